#pragma once

#include <span>
#include <vector>

#include "dmx/kernels.hpp"

namespace dmx {

struct BoltzOpts {
  int sphere_order = 4;
  // pairs with |f(v)g(w)| + |g(v)f(w)| below prune_rel * max|f| max|g| are
  // skipped; the collision sphere preserves |v|^2 + |w|^2 so skipped gains are
  // bounded by the same level (see tests). 0 disables.
  double prune_rel = 1e-14;
  GatherSpec gather_f{};
  GatherSpec gather_g{};
  bool conserve_project = false;  // post-hoc least-squares projection (intra only)
  // heavy-argument factors use a node Taylor step for |eps| <= taylor_eps_max,
  // trilinear gathering otherwise
  double taylor_eps_max = 0.25;
};

// intra-species operator, symmetric bilinear extension of Q(f, f):
// 1/2 [f' g'* + g' f'* - f g* - g f*] against B = 0.5 |w|^gamma b0
DistField q_intra(const VelocityGrid& g, const DistField& f, const DistField& h,
                  const BoltzKernel& k, const BoltzOpts& o);

// nH * q0(fL): sigma-form limit operator, post-collision point |v| sigma.
// Bit-exact eps -> 0 evaluation of the discrete q_inter_lh quadrature.
DistField q0_lh(const VelocityGrid& g, const DistField& fL, double nH, const BoltzKernel& k,
                const BoltzOpts& o);

// limit heavy operator, drift form: -2 grad(fH) . D with
// D = sum_v w v fL(v) * 0.5 * sum_k wk B(v,sigma_k) (1 - vhat.sigma_k)
DistField q0_hl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                const BoltzKernel& k, const BoltzOpts& o);

// literal appendix operators evaluated at each requested epsilon in one pass
// over shared quadrature geometry (entries may be negative or zero).
std::vector<DistField> q_inter_lh_set(const VelocityGrid& g, const DistField& fL,
                                      const DistField& fH, const BoltzKernel& k,
                                      std::span<const double> eps, const BoltzOpts& o);
std::vector<DistField> q_inter_hl_set(const VelocityGrid& g, const DistField& fH,
                                      const DistField& fL, const BoltzKernel& k,
                                      std::span<const double> eps, const BoltzOpts& o);

// public inter-species operators; HL carries the 1/eps normalization that the
// split scheme and the moment hierarchy of the limit system require
DistField q_inter_lh_eps(const VelocityGrid& g, const DistField& fL, const DistField& fH,
                         double eps, const BoltzKernel& k, const BoltzOpts& o);
DistField q_inter_hl_eps(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                         double eps, const BoltzKernel& k, const BoltzOpts& o);

// polarization: 1/4 [op(f+g) - op(f-g)]
template <typename Op>
DistField bilinear(Op&& op, const DistField& f, const DistField& g) {
  DistField fp(f.size()), fm(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    fp[i] = f[i] + g[i];
    fm[i] = f[i] - g[i];
  }
  DistField a = op(fp);
  const DistField b = op(fm);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.25 * (a[i] - b[i]);
  return a;
}

// least-squares removal of the discrete (1, v, |v|^2) moments
void project_collision_invariants(const VelocityGrid& g, DistField& q);

}  // namespace dmx
