#pragma once

#include "dmx/boltzmann.hpp"
#include "dmx/fpl.hpp"
#include "dmx/grid.hpp"
#include "dmx/penalty.hpp"

namespace dmx {

// split state f = f0 + eps f1 per species, plus the tracked moment systems
// that generate the penalty Maxwellians for f_{L,0} and f_{H,0}
struct SplitState {
  DistField fL0, fL1, fH0, fH1;
  MomentVector momL0, momH0;
  double eps = 1.0;
  double t = 0.0;
};

struct SchemeConfig {
  double dt = 1e-2;
  CollisionModel model = CollisionModel::boltzmann;
  BoltzKernel intra_L{}, intra_H{}, inter{};
  FPLKernel fintra_L{0.0, 0.0}, fintra_H{0.0, 0.0}, finter{0.0, 0.0};
  PenaltyConfig pen{};
  int sphere_order = 2;
  double prune_rel = 1e-14;
  double taylor_eps_max = 0.25;
  // Maxwellian-weighted gathering referenced to the tracked moments; plain
  // trilinear when off (see README on desk-scale resolution)
  bool weighted_interp = true;
  // restore the mass and energy rows of the f1 updates to their penalty-free
  // values (the linear penalty otherwise damps the collision-invariant
  // content of f1 and with it the inter-species energy exchange)
  bool project_invariants = true;
  // least-squares conservation projection of the intra-species operator
  // outputs inside scheme steps
  bool conserve_intra = true;
  // use the paper-printed dt/eps^2 prefactor in the heavy moment update
  // instead of the dt/eps consistent with the heavy field update
  bool heavy_moment_eps2 = false;
};

SplitState make_split_state(const VelocityGrid& g, double eps, double nL, const Vec3& uL,
                            double TL, double nH, const Vec3& uH, double TH,
                            bool well_prepared_f1);

// moment systems: P0 and P2 of f_{L,0} are exactly constant; P1 picks up the
// q0 friction. The heavy side advances P1 and P2 with the drift-form limit
// operator (identically zero for even f_{L,0}).
MomentVector update_moments_L0(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c);
MomentVector update_moments_H0(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c);

// the penalized semi-implicit f0 updates; moment vectors are the already
// advanced values (implementation steps (a), (b))
void step_f0(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c,
             const MomentVector& momL_next, const MomentVector& momH_next, DistField& fL0_next,
             DistField& fH0_next);

// the f1 updates; require the new f0 fields and moments (steps (c), (d))
void step_f1(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c,
             const DistField& fL0_next, const DistField& fH0_next,
             const MomentVector& momL_next, const MomentVector& momH_next, DistField& fL1_next,
             DistField& fH1_next);

// one full step in the order (a) light moments + f_{L,0}, (b) heavy moments
// + f_{H,0}, (c) f_{L,1}, (d) f_{H,1}
SplitState ap_step(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c);

// f = f0 + eps f1 per species
void reconstruct(const SplitState& s, DistField& fL, DistField& fH);

}  // namespace dmx
