#pragma once

#include "dmx/scheme.hpp"

namespace dmx {

struct SpatialMesh {
  int nx = 2;
  double dx = 1.0;
  bool periodic = true;
  SpatialMesh() = default;
  SpatialMesh(int n, double d) : nx(n), dx(d) {
    if (n < 2 || !(d > 0.0)) throw invalid_parameter("mesh: need nx >= 2 and dx > 0");
  }
};

// 1D-in-space slab of split states sharing one velocity grid, plus constant
// force fields
struct FieldArray {
  std::vector<SplitState> cells;
  Vec3 FL, FH;
};

struct TransportOpts {
  double cfl = 0.9;
  double psi1 = 1.0, psi2 = 1.0;
  double eps = 1.0;
};

// psi1 = min(1, 1/eps^2), psi2 = min(1, 1/eps)
std::pair<double, double> psi_factors(double eps);

// Step 1: per-cell penalized collision update. The (1 - eps^2 psi1) and
// (1 - eps psi2) transport corrections vanish identically for eps <= 1 and
// use pre-step fields (first order) otherwise.
FieldArray collision_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                          const SchemeConfig& c);

// Step 2: explicit transport; first-order upwind in x (periodic) and in v
// (zero inflow). The f0 equations advect the f1 fields and vice versa.
// Throws cfl-violation when dt exceeds the stability bound.
FieldArray transport_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                          double dt, double cfl = 0.9);

// collision then transport, plus the inhomogeneous moment updates using the
// pre-step f1 transport terms
FieldArray full_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                     const SchemeConfig& c, double cfl = 0.9);

}  // namespace dmx
