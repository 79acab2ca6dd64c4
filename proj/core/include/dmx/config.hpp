#pragma once

#include <string>

#include "dmx/scheme.hpp"
#include "dmx/spatial.hpp"

namespace dmx {

enum class RunMode { homogeneous, inhomogeneous, oracle, compare };

// flat key = value configuration, [section] headers, '#' comments;
// unknown keys are errors (see README for the grammar)
struct ScenarioConfig {
  RunMode mode = RunMode::homogeneous;
  double eps = 1e-2;
  double dt = 1e-2;
  double t_end = 1.0;

  double grid_vmax = 6.0;
  int grid_n = 8;
  int sphere_order = 2;

  int mesh_nx = 8;
  double mesh_dx = 1.0;
  double cfl = 0.9;

  CollisionModel model = CollisionModel::boltzmann;
  double gamma = 0.0;
  double b0 = 1.0;
  double delta = 0.0;
  double fpl_gamma = 0.0;

  PenaltyConfig pen{};
  bool weighted_interp = true;
  bool project_invariants = true;
  bool conserve_intra = true;
  bool heavy_moment_eps2 = false;
  double prune_rel = 1e-14;
  double taylor_eps_max = 0.25;
  double tol_neg = 1e-12;

  double nL = 1.0, TL = 1.0, nH = 1.0, TH = 1.0;
  Vec3 uL, uH;
  bool well_prepared = false;
  double perturb_nL = 0.0, perturb_nH = 0.0;  // sinusoidal density modulation
  double noise = 0.0;                         // seeded random density factor
  unsigned long seed = 0;
  Vec3 FL, FH;

  std::string output = "out.csv";
  int cadence = 1;
  std::string snapshot_prefix;  // empty = no snapshots
  int snapshot_every = 0;

  SchemeConfig scheme(double /*eps unused*/ = 0.0) const;
  int n_steps() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);
std::string dump_config(const ScenarioConfig& c);  // resolved key = value lines

}  // namespace dmx
