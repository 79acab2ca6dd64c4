#pragma once

#include <optional>

#include "dmx/grid.hpp"
#include "dmx/types.hpp"

namespace dmx {

enum class CollisionModel { boltzmann, fpl };

// Boltzmann kernel B(w, sigma) = 0.5 |w|^gamma b(what . sigma).
// Intra-species operators use the isotropic factor b = b0. Inter-species
// operators and their limits use b(c) = b0 (1 + c), the forward-weighted
// family whose loss rate is 2 pi b0 |w|^gamma and whose temperature-exchange
// coefficient is lambda(T) = (4 pi / 3) b0 T at gamma = 0.
struct BoltzKernel {
  double gamma = 0.0;  // Maxwell molecules by default; gamma = 1 hard spheres
  double b0 = 1.0;
  double delta = 0.0;  // |w| regularization for gamma < 0; 0 = pick 1e-6 vmax
};

// FPL kernel B(w) = 0.5 |w|^(gamma+2), S(w) = Id - w w^T / |w|^2.
struct FPLKernel {
  double gamma = -3.0;  // Coulomb
  double delta = 0.0;   // regularization; 0 = pick 1e-6 vmax
};

inline double boltz_delta(const BoltzKernel& k, const VelocityGrid& g) {
  return k.delta > 0.0 ? k.delta : 1e-6 * g.vmax();
}
inline double fpl_delta(const FPLKernel& k, const VelocityGrid& g) {
  return k.delta > 0.0 ? k.delta : 1e-6 * g.vmax();
}

// Gathering mode for off-grid evaluations inside the collision quadratures.
// plain: trilinear on f, zero outside the cube (the public cutoff convention).
// weighted: f ~ M_ref * h with h = f / M_ref interpolated trilinearly with
// clamp-to-edge extrapolation and M_ref evaluated analytically; O(eps)-moved
// points at a node use a first-order Taylor of h with central differences.
// Exact on fields equal to their reference Maxwellian.
struct GatherSpec {
  bool weighted = false;
  double ref_n = 1.0;
  Vec3 ref_u;
  double ref_T = 1.0;
  // reference floor: h = f / max(M_ref, floor_rel * max M_ref). Tail nodes
  // otherwise amplify physically negligible absolute noise by 1/M_ref.
  double floor_rel = 1e-3;
};

// Precomputed per-field gathering context.
class FieldGather {
 public:
  FieldGather(const VelocityGrid& g, const DistField& f, const GatherSpec& spec,
              bool need_taylor);

  double node(std::size_t i) const { return (*f_)[i]; }
  // value at an arbitrary point
  double at(const Vec3& p) const;
  // value at node i displaced by d (|d| expected O(eps))
  double at_node_offset(std::size_t i, const Vec3& d) const;
  bool taylor_ready() const { return !gh_.empty(); }

  // anchored evaluation: freeze the interpolant's value and in-cell gradient
  // at p0 and evaluate at nearby points analytically in the displacement, so
  // that epsilon-differencing never crosses an interpolation kink
  struct Anchor {
    Vec3 p0;
    double v = 0.0;
    Vec3 grad;
    bool inside = false;
  };
  Anchor anchor(const Vec3& p0) const;
  double at_anchor(const Anchor& a, const Vec3& p) const;

 private:
  const VelocityGrid* g_;
  const DistField* f_;
  GatherSpec spec_;
  DistField h_;            // weighted mode: f / max(M_ref, floor)
  double mfloor_ = 0.0;
  std::vector<Vec3> gh_;   // central-difference gradient of h (or of f in plain mode)

  double clamped_trilinear(const DistField& a, const Vec3& p) const;
};

// central-difference gradient, one-sided at the domain boundary
std::vector<Vec3> gradient_central(const VelocityGrid& g, const DistField& f);

}  // namespace dmx
