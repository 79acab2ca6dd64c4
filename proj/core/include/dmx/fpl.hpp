#pragma once

#include <span>
#include <vector>

#include "dmx/kernels.hpp"

namespace dmx {

struct FPLOpts {
  double prune_rel = 1e-14;
  bool conserve_project = false;
};

// divergence adjoint to the central/one-sided gradient: div = -G^T.
// Row sums of G vanish, so every div(...) field has exactly zero discrete mass.
DistField divergence_adjoint(const VelocityGrid& g, const std::vector<Vec3>& flux);

// quadratic Landau operator Q(f, f) in divergence form
DistField q_intra_fpl(const VelocityGrid& g, const DistField& f, const FPLKernel& k,
                      const FPLOpts& o = {});

// nH * div(B(v) S(v) grad f): symmetric negative-semidefinite in the plain
// l2 inner product by construction (-G^T W G with W = B S >= 0)
DistField q0_lh_fpl(const VelocityGrid& g, const DistField& fL, double nH, const FPLKernel& k);

// the same operator applied as a linear map (for the CG solve), nH = 1
DistField apply_q0_sym_fpl(const VelocityGrid& g, const DistField& h, const FPLKernel& k);

// drift form -2 grad(fH) . int B(v)/|v|^2 v fL dv
DistField q0_hl_fpl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                    const FPLKernel& k);

// literal appendix inter-species operators at each epsilon (may be <= 0)
std::vector<DistField> q_inter_lh_fpl_set(const VelocityGrid& g, const DistField& fL,
                                          const DistField& fH, const FPLKernel& k,
                                          std::span<const double> eps, const FPLOpts& o = {});
std::vector<DistField> q_inter_hl_fpl_set(const VelocityGrid& g, const DistField& fH,
                                          const DistField& fL, const FPLKernel& k,
                                          std::span<const double> eps, const FPLOpts& o = {});

DistField q_inter_lh_eps_fpl(const VelocityGrid& g, const DistField& fL, const DistField& fH,
                             double eps, const FPLKernel& k, const FPLOpts& o = {});
// carries the 1/eps normalization (see q_inter_hl_eps)
DistField q_inter_hl_eps_fpl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                             double eps, const FPLKernel& k, const FPLOpts& o = {});

}  // namespace dmx
