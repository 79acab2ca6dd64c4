#include "dmx/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace dmx {

namespace {

constexpr char kCsvHeader[] =
    "t,n_L,ux_L,uy_L,uz_L,T_L,n_H,ux_H,uy_H,uz_H,T_H,mass_L,mass_H,energy_total,"
    "neg_nodes_L0,neg_nodes_H0";

struct Row {
  double t = 0;
  Moments L, H;
  double mass_L = 0, mass_H = 0, energy = 0;
  long neg_L = 0, neg_H = 0;
};

void write_row(std::ostream& os, const Row& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%ld,%ld",
                r.t, r.L.n, r.L.u.x, r.L.u.y, r.L.u.z, r.L.T, r.H.n, r.H.u.x, r.H.u.y, r.H.u.z,
                r.H.T, r.mass_L, r.mass_H, r.energy, r.neg_L, r.neg_H);
  os << buf << '\n';
}

long count_negative(const DistField& f, double tol) {
  long c = 0;
  for (double v : f) c += v < -tol;
  return c;
}

// observable row: moments of the reconstructed distributions, plus the
// tracked moment-system masses
Row observe(const VelocityGrid& g, const SplitState& s, double tol_neg) {
  Row r;
  r.t = s.t;
  DistField fL, fH;
  reconstruct(s, fL, fH);
  const MomentVector mL = compute_moments(g, fL);
  const MomentVector mH = compute_moments(g, fH);
  r.L = macro_from_moments(mL);
  r.H = macro_from_moments(mH);
  r.mass_L = s.momL0.p0;
  r.mass_H = s.momH0.p0;
  r.energy = mL.p2 + mH.p2;
  r.neg_L = count_negative(s.fL0, tol_neg);
  r.neg_H = count_negative(s.fH0, tol_neg);
  return r;
}

Row observe_macro(const MacroState& m) {
  Row r;
  r.t = m.t;
  r.L = {m.n_L, Vec3{}, m.T_L};
  r.H = {m.n_H, m.u_H, m.T_H};
  r.mass_L = m.n_L;
  r.mass_H = m.n_H;
  r.energy = 1.5 * (m.n_L * m.T_L + m.n_H * m.T_H) + 0.5 * m.n_H * norm2(m.u_H);
  return r;
}

void emit_header(std::ostream& os, const ScenarioConfig& cfg) {
  std::istringstream dump(dump_config(cfg));
  std::string line;
  while (std::getline(dump, line)) os << "# " << line << '\n';
  os << kCsvHeader << '\n';
}

int run_homogeneous(const ScenarioConfig& cfg, std::ostream& os) {
  const VelocityGrid g(cfg.grid_vmax, cfg.grid_n);
  SchemeConfig sc = cfg.scheme();
  SplitState s = make_split_state(g, cfg.eps, cfg.nL, cfg.uL, cfg.TL, cfg.nH, cfg.uH, cfg.TH,
                                  cfg.well_prepared);
  write_row(os, observe(g, s, cfg.tol_neg));
  const int steps = cfg.n_steps();
  for (int k = 1; k <= steps; ++k) {
    s = ap_step(g, s, sc);
    if (k % cfg.cadence == 0 || k == steps) write_row(os, observe(g, s, cfg.tol_neg));
    if (!cfg.snapshot_prefix.empty() && cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
      DistField fL, fH;
      reconstruct(s, fL, fH);
      write_snapshot(cfg.snapshot_prefix + "_L_" + std::to_string(k) + ".bin", g, fL);
      write_snapshot(cfg.snapshot_prefix + "_H_" + std::to_string(k) + ".bin", g, fH);
    }
  }
  return 0;
}

int run_oracle(const ScenarioConfig& cfg, std::ostream& os) {
  const VelocityGrid g(cfg.grid_vmax, cfg.grid_n);
  MacroState m{cfg.nL, cfg.TL, cfg.nH, cfg.uH, cfg.TH, 0.0};
  const BoltzKernel bk{cfg.gamma, cfg.b0, cfg.delta};
  const FPLKernel fk{cfg.fpl_gamma, cfg.delta};
  RelaxOpts ro;
  ro.sphere_order = cfg.sphere_order;
  write_row(os, observe_macro(m));
  const int steps = cfg.n_steps();
  for (int k = 1; k <= steps; ++k) {
    m = relax_step_implicit(m, cfg.dt, g, cfg.model, bk, fk, ro);
    if (k % cfg.cadence == 0 || k == steps) write_row(os, observe_macro(m));
  }
  return 0;
}

int run_inhomogeneous(const ScenarioConfig& cfg, std::ostream& os) {
  const VelocityGrid g(cfg.grid_vmax, cfg.grid_n);
  const SpatialMesh mesh(cfg.mesh_nx, cfg.mesh_dx);
  SchemeConfig sc = cfg.scheme();
  FieldArray fa;
  fa.FL = cfg.FL;
  fa.FH = cfg.FH;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double Lx = cfg.mesh_nx * cfg.mesh_dx;
  for (int ix = 0; ix < cfg.mesh_nx; ++ix) {
    const double x = (ix + 0.5) * cfg.mesh_dx;
    double mL = 1.0 + cfg.perturb_nL * std::sin(2.0 * M_PI * x / Lx);
    double mH = 1.0 + cfg.perturb_nH * std::sin(2.0 * M_PI * x / Lx);
    if (cfg.noise > 0.0) {
      mL *= 1.0 + cfg.noise * uni(rng);
      mH *= 1.0 + cfg.noise * uni(rng);
    }
    fa.cells.push_back(make_split_state(g, cfg.eps, cfg.nL * mL, cfg.uL, cfg.TL, cfg.nH * mH,
                                        cfg.uH, cfg.TH, cfg.well_prepared));
  }
  auto observe_avg = [&](double t) {
    // mass-weighted slab averages from summed reconstructed moments
    MomentVector mL, mH;
    double massL = 0, massH = 0;
    long negL = 0, negH = 0;
    for (const SplitState& s : fa.cells) {
      DistField fL, fH;
      reconstruct(s, fL, fH);
      const MomentVector a = compute_moments(g, fL);
      const MomentVector b = compute_moments(g, fH);
      mL.p0 += a.p0;
      mL.p1 += a.p1;
      mL.p2 += a.p2;
      mH.p0 += b.p0;
      mH.p1 += b.p1;
      mH.p2 += b.p2;
      massL += s.momL0.p0;
      massH += s.momH0.p0;
      negL += count_negative(s.fL0, cfg.tol_neg);
      negH += count_negative(s.fH0, cfg.tol_neg);
    }
    const double inv = 1.0 / cfg.mesh_nx;
    Row r;
    r.t = t;
    MomentVector sL{mL.p0 * inv, mL.p1 * inv, mL.p2 * inv};
    MomentVector sH{mH.p0 * inv, mH.p1 * inv, mH.p2 * inv};
    r.L = macro_from_moments(sL);
    r.H = macro_from_moments(sH);
    r.mass_L = massL * inv;
    r.mass_H = massH * inv;
    r.energy = (mL.p2 + mH.p2) * inv;
    r.neg_L = negL;
    r.neg_H = negH;
    return r;
  };
  write_row(os, observe_avg(0.0));
  const int steps = cfg.n_steps();
  for (int k = 1; k <= steps; ++k) {
    fa = full_step(g, mesh, fa, sc, cfg.cfl);
    if (k % cfg.cadence == 0 || k == steps) write_row(os, observe_avg(k * cfg.dt));
  }
  return 0;
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg) {
  if (cfg.mode == RunMode::compare)
    throw validation_error("run_scenario: use the compare verb for comparison mode");
  std::ofstream os(cfg.output);
  if (!os) throw io_error("cannot open output file: " + cfg.output);
  emit_header(os, cfg);
  try {
    switch (cfg.mode) {
      case RunMode::homogeneous: return run_homogeneous(cfg, os);
      case RunMode::oracle: return run_oracle(cfg, os);
      case RunMode::inhomogeneous: return run_inhomogeneous(cfg, os);
      default: return 1;
    }
  } catch (const std::exception& e) {
    os << "# TRUNCATED: " << e.what() << '\n';
    os.flush();
    throw;
  }
}

CsvSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open csv: " + path);
  CsvSeries s;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (!header) {
      s.columns = parts;
      header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(parts.size());
    for (const auto& p : parts) row.push_back(std::stod(p));
    if (row.size() != s.columns.size()) throw io_error("csv: ragged row in " + path);
    s.rows.push_back(std::move(row));
  }
  if (!header) throw io_error("csv: no header in " + path);
  return s;
}

CompareSpec CompareSpec::parse(const std::string& text) {
  CompareSpec spec;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "interp") {
      spec.interpolate = true;
    } else if (tok.rfind("rel=", 0) == 0) {
      spec.rel = std::stod(tok.substr(4));
    } else if (tok.rfind("abs=", 0) == 0) {
      spec.abs_floor = std::stod(tok.substr(4));
    } else if (tok.rfind("col:", 0) == 0) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw validation_error("tolspec: bad column entry " + tok);
      spec.per_column[tok.substr(4, eq - 4)] = std::stod(tok.substr(eq + 1));
    } else {
      throw validation_error("tolspec: unknown entry '" + tok + "'");
    }
  }
  return spec;
}

CompareReport compare_runs(const CsvSeries& a, const CsvSeries& b, const CompareSpec& spec) {
  if (a.columns != b.columns) throw mismatched_series("compare: column sets differ");
  if (a.rows.empty() || b.rows.empty()) throw mismatched_series("compare: empty series");
  // align timestamps
  std::vector<std::vector<double>> bi;  // b aligned onto a's timestamps
  if (!spec.interpolate) {
    if (a.rows.size() != b.rows.size()) throw mismatched_series("compare: row counts differ");
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double ta = a.rows[r][0], tb = b.rows[r][0];
      if (std::abs(ta - tb) > 1e-9 * (1.0 + std::abs(ta)))
        throw mismatched_series("compare: timestamps differ (pass interp to interpolate)");
      bi.push_back(b.rows[r]);
    }
  } else {
    for (const auto& row : a.rows) {
      const double t = row[0];
      // clamp + linear interpolation in time
      std::size_t hi = 0;
      while (hi + 1 < b.rows.size() && b.rows[hi][0] < t) ++hi;
      const std::size_t lo = hi > 0 ? hi - 1 : 0;
      const double t0 = b.rows[lo][0], t1 = b.rows[hi][0];
      const double w = (t1 > t0) ? std::clamp((t - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
      std::vector<double> r(b.columns.size());
      for (std::size_t c = 0; c < r.size(); ++c)
        r[c] = (1.0 - w) * b.rows[lo][c] + w * b.rows[hi][c];
      bi.push_back(std::move(r));
    }
  }
  CompareReport rep;
  rep.columns = a.columns;
  rep.max_rel.assign(a.columns.size(), 0.0);
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    for (std::size_t c = 1; c < a.columns.size(); ++c) {
      const double x = a.rows[r][c], y = bi[r][c];
      const double den = std::max({std::abs(x), std::abs(y), spec.abs_floor});
      rep.max_rel[c] = std::max(rep.max_rel[c], std::abs(x - y) / den);
    }
  }
  rep.pass = true;
  for (std::size_t c = 1; c < a.columns.size(); ++c) {
    const auto it = spec.per_column.find(a.columns[c]);
    const double tol = it != spec.per_column.end() ? it->second : spec.rel;
    if (rep.max_rel[c] > tol) rep.pass = false;
  }
  return rep;
}

void write_snapshot(const std::string& path, const VelocityGrid& g, const DistField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open snapshot file: " + path);
  const char magic[8] = {'D', 'M', 'X', 'F', 'L', 'D', '0', '1'};
  os.write(magic, 8);
  const std::int32_t dims[3] = {g.n(), g.n(), g.n()};
  os.write(reinterpret_cast<const char*>(dims), sizeof dims);
  const double vmax = g.vmax();
  os.write(reinterpret_cast<const char*>(&vmax), sizeof vmax);
  os.write(reinterpret_cast<const char*>(f.data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
}

DistField read_snapshot(const std::string& path, int& n, double& vmax) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open snapshot file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "DMXFLD01", 8) != 0) throw io_error("snapshot: bad magic in " + path);
  std::int32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(&vmax), sizeof vmax);
  n = dims[0];
  DistField f(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  in.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!in) throw io_error("snapshot: truncated file " + path);
  return f;
}

}  // namespace dmx
