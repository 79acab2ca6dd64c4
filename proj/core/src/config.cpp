#include "dmx/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dmx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw validation_error("config line " + std::to_string(line) + ": bad boolean for '" + key +
                         "': " + v);
}

double parse_num(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos != v.size())
    throw validation_error("config line " + std::to_string(line) + ": bad number for '" + key +
                           "': " + v);
  return x;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw validation_error("config line " + std::to_string(line) + ": malformed section");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(line) + ": expected key = value");
    const std::string key = section.empty() ? trim(s.substr(0, eq))
                                            : section + " " + trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    auto num = [&] { return parse_num(val, key, line); };
    auto bol = [&] { return parse_bool(val, key, line); };

    if (key == "run mode") {
      if (val == "homogeneous") c.mode = RunMode::homogeneous;
      else if (val == "inhomogeneous") c.mode = RunMode::inhomogeneous;
      else if (val == "oracle") c.mode = RunMode::oracle;
      else if (val == "compare") c.mode = RunMode::compare;
      else
        throw validation_error("config line " + std::to_string(line) + ": unknown mode " + val);
    } else if (key == "run eps") c.eps = num();
    else if (key == "run dt") c.dt = num();
    else if (key == "run t_end") c.t_end = num();
    else if (key == "run output") c.output = val;
    else if (key == "run cadence") c.cadence = static_cast<int>(num());
    else if (key == "run snapshot_prefix") c.snapshot_prefix = val;
    else if (key == "run snapshot_every") c.snapshot_every = static_cast<int>(num());
    else if (key == "run seed") c.seed = static_cast<unsigned long>(num());
    else if (key == "grid vmax") c.grid_vmax = num();
    else if (key == "grid n") c.grid_n = static_cast<int>(num());
    else if (key == "grid sphere_order") c.sphere_order = static_cast<int>(num());
    else if (key == "mesh nx") c.mesh_nx = static_cast<int>(num());
    else if (key == "mesh dx") c.mesh_dx = num();
    else if (key == "mesh cfl") c.cfl = num();
    else if (key == "model collision") {
      if (val == "boltzmann") c.model = CollisionModel::boltzmann;
      else if (val == "fpl") c.model = CollisionModel::fpl;
      else
        throw validation_error("config line " + std::to_string(line) + ": unknown model " + val);
    } else if (key == "model gamma") c.gamma = num();
    else if (key == "model b0") c.b0 = num();
    else if (key == "model delta") c.delta = num();
    else if (key == "model fpl_gamma") c.fpl_gamma = num();
    else if (key == "penalty beta0") c.pen.beta0 = num();
    else if (key == "penalty mu_margin") c.pen.mu_margin = num();
    else if (key == "penalty cg_tol") c.pen.cg_tol = num();
    else if (key == "penalty cg_max_iter") c.pen.cg_max_iter = static_cast<int>(num());
    else if (key == "penalty default_beta") c.pen.default_beta = num();
    else if (key == "penalty project_invariants") c.project_invariants = bol();
    else if (key == "scheme weighted_interp") c.weighted_interp = bol();
    else if (key == "scheme conserve_intra") c.conserve_intra = bol();
    else if (key == "scheme heavy_moment_eps2") c.heavy_moment_eps2 = bol();
    else if (key == "scheme prune_rel") c.prune_rel = num();
    else if (key == "scheme taylor_eps_max") c.taylor_eps_max = num();
    else if (key == "scheme tol_neg") c.tol_neg = num();
    else if (key == "init nL") c.nL = num();
    else if (key == "init TL") c.TL = num();
    else if (key == "init nH") c.nH = num();
    else if (key == "init TH") c.TH = num();
    else if (key == "init uLx") c.uL.x = num();
    else if (key == "init uLy") c.uL.y = num();
    else if (key == "init uLz") c.uL.z = num();
    else if (key == "init uHx") c.uH.x = num();
    else if (key == "init uHy") c.uH.y = num();
    else if (key == "init uHz") c.uH.z = num();
    else if (key == "init well_prepared") c.well_prepared = bol();
    else if (key == "init perturb_nL") c.perturb_nL = num();
    else if (key == "init perturb_nH") c.perturb_nH = num();
    else if (key == "init noise") c.noise = num();
    else if (key == "forces FLx") c.FL.x = num();
    else if (key == "forces FLy") c.FL.y = num();
    else if (key == "forces FLz") c.FL.z = num();
    else if (key == "forces FHx") c.FH.x = num();
    else if (key == "forces FHy") c.FH.y = num();
    else if (key == "forces FHz") c.FH.z = num();
    else
      throw validation_error("config line " + std::to_string(line) + ": unknown key '" + key +
                             "'");
  }

  // validation
  if (!(c.eps > 0.0)) throw validation_error("config: eps must be > 0");
  if (c.eps > 1.0) throw validation_error("config: eps must be <= 1");
  if (!(c.dt > 0.0)) throw validation_error("config: dt must be > 0");
  if (c.t_end < 0.0) throw validation_error("config: t_end must be >= 0");
  if (!(c.TL > 0.0) || !(c.TH > 0.0)) throw validation_error("config: temperatures must be > 0");
  if (c.nL < 0.0 || c.nH < 0.0) throw validation_error("config: densities must be >= 0");
  if (c.cadence < 1) throw validation_error("config: cadence must be >= 1");
  if (c.grid_n < 4 || c.grid_n % 2)
    throw validation_error("config: grid n must be even and >= 4");
  if (!(c.grid_vmax > 0.0)) throw validation_error("config: grid vmax must be > 0");
  if (c.mode == RunMode::inhomogeneous && (c.mesh_nx < 2 || !(c.mesh_dx > 0.0)))
    throw validation_error("config: mesh needs nx >= 2 and dx > 0");
  return c;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SchemeConfig ScenarioConfig::scheme(double) const {
  SchemeConfig s;
  s.dt = dt;
  s.model = model;
  s.intra_L = {gamma, b0, delta};
  s.intra_H = {gamma, b0, delta};
  s.inter = {gamma, b0, delta};
  s.fintra_L = {fpl_gamma, delta};
  s.fintra_H = {fpl_gamma, delta};
  s.finter = {fpl_gamma, delta};
  s.pen = pen;
  s.sphere_order = sphere_order;
  s.prune_rel = prune_rel;
  s.taylor_eps_max = taylor_eps_max;
  s.weighted_interp = weighted_interp;
  s.project_invariants = project_invariants;
  s.conserve_intra = conserve_intra;
  s.heavy_moment_eps2 = heavy_moment_eps2;
  return s;
}

int ScenarioConfig::n_steps() const {
  return t_end > 0.0 ? static_cast<int>(std::llround(t_end / dt)) : 0;
}

std::string dump_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const char* mode = c.mode == RunMode::homogeneous      ? "homogeneous"
                     : c.mode == RunMode::inhomogeneous ? "inhomogeneous"
                     : c.mode == RunMode::oracle        ? "oracle"
                                                        : "compare";
  os << "run mode = " << mode << "\nrun eps = " << c.eps << "\nrun dt = " << c.dt
     << "\nrun t_end = " << c.t_end << "\nrun cadence = " << c.cadence
     << "\nrun seed = " << c.seed << "\ngrid vmax = " << c.grid_vmax
     << "\ngrid n = " << c.grid_n << "\ngrid sphere_order = " << c.sphere_order
     << "\nmodel collision = " << (c.model == CollisionModel::boltzmann ? "boltzmann" : "fpl")
     << "\nmodel gamma = " << c.gamma << "\nmodel b0 = " << c.b0
     << "\nmodel fpl_gamma = " << c.fpl_gamma << "\npenalty beta0 = " << c.pen.beta0
     << "\npenalty mu_margin = " << c.pen.mu_margin
     << "\npenalty project_invariants = " << (c.project_invariants ? "true" : "false")
     << "\nscheme weighted_interp = " << (c.weighted_interp ? "true" : "false")
     << "\nscheme conserve_intra = " << (c.conserve_intra ? "true" : "false")
     << "\nscheme heavy_moment_eps2 = " << (c.heavy_moment_eps2 ? "true" : "false")
     << "\ninit nL = " << c.nL << "\ninit TL = " << c.TL << "\ninit nH = " << c.nH
     << "\ninit TH = " << c.TH << "\ninit uHx = " << c.uH.x
     << "\ninit well_prepared = " << (c.well_prepared ? "true" : "false");
  if (c.mode == RunMode::inhomogeneous) {
    os << "\nmesh nx = " << c.mesh_nx << "\nmesh dx = " << c.mesh_dx << "\nmesh cfl = " << c.cfl
       << "\ninit perturb_nL = " << c.perturb_nL << "\ninit perturb_nH = " << c.perturb_nH
       << "\ninit noise = " << c.noise;
  }
  return os.str();
}

}  // namespace dmx
