#include "dmx/scheme.hpp"

#include <algorithm>
#include <cmath>

namespace dmx {

namespace {

GatherSpec ref_of(const MomentVector& m, bool weighted) {
  if (!weighted) return {};
  const Moments mm = macro_from_moments(m);
  return {true, mm.n, mm.u, mm.T};
}

struct MomPair {
  double p0 = 0.0, p2 = 0.0;
  Vec3 p1;
};

MomPair field_moments(const VelocityGrid& g, const DistField& f) {
  MomPair m;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 v = g.node(i);
    m.p0 += f[i];
    m.p1 += f[i] * v;
    m.p2 += 0.5 * f[i] * norm2(v);
  }
  const double w = g.cell_volume();
  m.p0 *= w;
  m.p1 = m.p1 * w;
  m.p2 *= w;
  return m;
}

// correct the discrete mass and energy of f to the given targets with an
// even two-parameter Maxwellian-shaped correction (momentum untouched)
void set_mass_energy(const VelocityGrid& g, DistField& f, const GatherSpec& ref, double p0_t,
                     double p2_t) {
  const DistField M = maxwellian(g, ref.weighted ? ref.ref_n : 1.0,
                                 ref.weighted ? ref.ref_u : Vec3{},
                                 ref.weighted ? ref.ref_T : 1.0);
  double m00 = 0, m02 = 0, m20 = 0, m22 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v2 = norm2(g.node(i));
    m00 += M[i];
    m02 += M[i] * v2;
    m20 += 0.5 * v2 * M[i];
    m22 += 0.5 * v2 * M[i] * v2;
  }
  const double w = g.cell_volume();
  m00 *= w;
  m02 *= w;
  m20 *= w;
  m22 *= w;
  const MomPair cur = field_moments(g, f);
  const double r0 = p0_t - cur.p0;
  const double r2 = p2_t - cur.p2;
  const double det = m00 * m22 - m02 * m20;
  const double c0 = (r0 * m22 - r2 * m02) / det;
  const double c2 = (m00 * r2 - m20 * r0) / det;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] += (c0 + c2 * norm2(g.node(i))) * M[i];
}

}  // namespace

SplitState make_split_state(const VelocityGrid& g, double eps, double nL, const Vec3& uL,
                            double TL, double nH, const Vec3& uH, double TH,
                            bool well_prepared_f1) {
  if (!(eps > 0.0) || eps > 1.0) throw invalid_parameter("split state: eps must be in (0, 1]");
  SplitState s;
  s.eps = eps;
  s.fL0 = maxwellian(g, nL, uL, TL);
  s.fH0 = maxwellian(g, nH, uH, TH);
  s.fL1.assign(g.size(), 0.0);
  s.fH1.assign(g.size(), 0.0);
  if (well_prepared_f1) {
    // f_{L,1}* = (M_{L,0}/T_{L,0}) u_H . v
    for (std::size_t i = 0; i < s.fL1.size(); ++i)
      s.fL1[i] = s.fL0[i] / TL * dot(uH, g.node(i));
  }
  s.momL0 = {nL, nL * uL, 0.5 * nL * norm2(uL) + 1.5 * nL * TL};
  s.momH0 = {nH, nH * uH, 0.5 * nH * norm2(uH) + 1.5 * nH * TH};
  s.t = 0.0;
  return s;
}

namespace {

// q0 of the light f0 field in the configured model
DistField q0_light(const VelocityGrid& g, const DistField& fL0, double nH,
                   const SchemeConfig& c, const GatherSpec& refL) {
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts o;
    o.sphere_order = c.sphere_order;
    o.prune_rel = c.prune_rel;
    o.gather_f = refL;
    return q0_lh(g, fL0, nH, c.inter, o);
  }
  return q0_lh_fpl(g, fL0, nH, c.finter);
}

DistField q0_heavy_drift(const VelocityGrid& g, const DistField& fH0, const DistField& fL0,
                         const SchemeConfig& c) {
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts o;
    o.sphere_order = c.sphere_order;
    o.prune_rel = c.prune_rel;
    return q0_hl(g, fH0, fL0, c.inter, o);
  }
  return q0_hl_fpl(g, fH0, fL0, c.finter);
}

DistField intra(const VelocityGrid& g, const DistField& f, const BoltzKernel& bk,
                const FPLKernel& fk, const SchemeConfig& c, const GatherSpec& ref) {
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts o;
    o.sphere_order = c.sphere_order;
    o.prune_rel = c.prune_rel;
    o.gather_f = ref;
    o.conserve_project = c.conserve_intra;
    return q_intra(g, f, f, bk, o);
  }
  FPLOpts o;
  o.prune_rel = c.prune_rel;
  o.conserve_project = c.conserve_intra;
  return q_intra_fpl(g, f, fk, o);
}

}  // namespace

MomentVector update_moments_L0(const VelocityGrid& g, const SplitState& s,
                               const SchemeConfig& c) {
  MomentVector m = s.momL0;
  const GatherSpec refL = ref_of(s.momL0, c.weighted_interp);
  const DistField q0L = q0_light(g, s.fL0, s.momH0.p0, c, refL);
  const double a = c.dt / (s.eps * s.eps);
  Vec3 mom;
  for (std::size_t i = 0; i < q0L.size(); ++i) mom += q0L[i] * g.node(i);
  // The friction row is relaxed against the q0 loss bound instead of taking
  // the explicit increment: the explicit row amplifies any odd component by
  // |1 - nu dt/eps^2| per step, which is violently unstable in the stiff
  // regime. At the fixed point both forms agree.
  double nu = 0.0;
  if (c.model == CollisionModel::boltzmann) {
    nu = s.momH0.p0 * linear_mu(g, MuMode::boltzmann_q0, c.inter, c.finter, nullptr);
  } else {
    const double d = fpl_delta(c.finter, g);
    const double maxB =
        0.5 * std::pow(3.0 * g.vmax() * g.vmax() + d * d, 0.5 * (c.finter.gamma + 2.0));
    nu = 6.0 * s.momH0.p0 * maxB / (g.dv() * g.dv());
  }
  m.p1 += (a / (1.0 + a * nu) * g.cell_volume()) * mom;
  return m;
}

MomentVector update_moments_H0(const VelocityGrid& g, const SplitState& s,
                               const SchemeConfig& c) {
  MomentVector m = s.momH0;
  const DistField q0H = q0_heavy_drift(g, s.fH0, s.fL0, c);
  const double p = c.heavy_moment_eps2 ? s.eps * s.eps : s.eps;
  const double a = c.dt / p;
  Vec3 mom;
  double en = 0.0;
  for (std::size_t i = 0; i < q0H.size(); ++i) {
    const Vec3 v = g.node(i);
    mom += q0H[i] * v;
    en += 0.5 * norm2(v) * q0H[i];
  }
  m.p1 += (a * g.cell_volume()) * mom;
  m.p2 += a * g.cell_volume() * en;
  return m;
}

void step_f0(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c,
             const MomentVector& momL_next, const MomentVector& momH_next, DistField& fL0_next,
             DistField& fH0_next) {
  const double a2 = c.dt / (s.eps * s.eps);
  const double a1 = c.dt / s.eps;
  const GatherSpec refLn = ref_of(s.momL0, c.weighted_interp);
  const GatherSpec refHn = ref_of(s.momH0, c.weighted_interp);

  const Moments mLn = macro_from_moments(s.momL0);
  const Moments mLx = macro_from_moments(momL_next);
  const Moments mHn = macro_from_moments(s.momH0);
  const Moments mHx = macro_from_moments(momH_next);
  const DistField MLn = maxwellian(g, mLn.n, mLn.u, mLn.T);
  const DistField MLx = maxwellian(g, mLx.n, mLx.u, mLx.T);
  const DistField MHn = maxwellian(g, mHn.n, mHn.u, mHn.T);
  const DistField MHx = maxwellian(g, mHx.n, mHx.u, mHx.T);

  const DistField QLL = intra(g, s.fL0, c.intra_L, c.fintra_L, c, refLn);
  const DistField QHH = intra(g, s.fH0, c.intra_H, c.fintra_H, c, refHn);
  const DistField q0L = q0_light(g, s.fL0, s.momH0.p0, c, refLn);
  const DistField q0H = q0_heavy_drift(g, s.fH0, s.fL0, c);

  if (c.model == CollisionModel::boltzmann) {
    // the BGK rate has to dominate the loss part of Q for the stiff limit
    const double lossL = linear_mu(g, MuMode::boltzmann_loss, c.intra_L, c.fintra_L, &s.fL0);
    const double lossH = linear_mu(g, MuMode::boltzmann_loss, c.intra_H, c.fintra_H, &s.fH0);
    // the sup-ratio estimator is unreliable near equilibrium (noise over
    // noise); keep the rate within a decade of the loss bound
    const double betaL = std::clamp(bgk_beta(s.fL0, MLn, QLL, c.pen), lossL, 10.0 * lossL);
    const double betaH = std::clamp(bgk_beta(s.fH0, MHn, QHH, c.pen), lossH, 10.0 * lossH);
    DistField rhsL(g.size()), rhsH(g.size());
    for (std::size_t i = 0; i < rhsL.size(); ++i) {
      rhsL[i] = s.fL0[i] + a2 * (QLL[i] - betaL * (MLn[i] - s.fL0[i]) + q0L[i]);
      rhsH[i] = s.fH0[i] + a1 * (QHH[i] - betaH * (MHn[i] - s.fH0[i]) + q0H[i]);
    }
    fL0_next = bgk_implicit_update(rhsL, MLx, betaL * a2);
    fH0_next = bgk_implicit_update(rhsH, MHx, betaH * a1);
  } else {
    // Jin-Yan linear FP penalty: beta = beta0 * lambda_max(D_A), D_A = 2 D
    const double betaL = 4.0 * c.pen.beta0 * linear_mu(g, MuMode::fpl, c.intra_L, c.fintra_L, &s.fL0);
    const double betaH = 4.0 * c.pen.beta0 * linear_mu(g, MuMode::fpl, c.intra_H, c.fintra_H, &s.fH0);
    const DistField PLn = fp_penalty_apply(g, s.fL0, MLn);
    const DistField PHn = fp_penalty_apply(g, s.fH0, MHn);
    DistField rhsL(g.size()), rhsH(g.size());
    for (std::size_t i = 0; i < rhsL.size(); ++i) {
      rhsL[i] = s.fL0[i] + a2 * (QLL[i] - betaL * PLn[i] + q0L[i]);
      rhsH[i] = s.fH0[i] + a1 * (QHH[i] - betaH * PHn[i] + q0H[i]);
    }
    fL0_next = fp_implicit_solve(g, rhsL, MLx, betaL * a2, c.pen);
    fH0_next = fp_implicit_solve(g, rhsH, MHx, betaH * a1, c.pen);
  }
}

namespace {

}  // namespace

// The complete inter-species energy exchange of one step, measured on the
// reconstructed pair (f0 + eps f1): the symmetric second difference of the
// literal quadrature kills its eps^0 and eps^1 quadrature noise and leaves
// the physical exchange rate at the reconstructed temperatures, including
// every f1 back-reaction, in one bilinear evaluation.
static double exchange_ledger(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c,
                              const DistField& fL0_next, const DistField& fH0_next,
                              const GatherSpec& refL, const GatherSpec& refH) {
  const double eps = s.eps;
  const std::size_t nn = g.size();
  DistField fLrec(nn), fHrec(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    fLrec[i] = fL0_next[i] + eps * s.fL1[i];
    fHrec[i] = fH0_next[i] + eps * s.fH1[i];
  }
  const double e3[3] = {eps, -eps, 0.0};
  std::vector<DistField> drv;
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts ob;
    ob.sphere_order = c.sphere_order;
    ob.prune_rel = c.prune_rel;
    ob.taylor_eps_max = c.taylor_eps_max;
    if (c.weighted_interp) {
      // tracked-moment references: the f0 parts match them exactly, which
      // keeps the ratio fields flat (quadrature-moment references reintroduce
      // O(eps)-slope noise through the h mismatch)
      ob.gather_f = refH;
      ob.gather_g = refL;
    }
    drv = q_inter_hl_set(g, fHrec, fLrec, c.inter, e3, ob);
  } else {
    FPLOpts of;
    of.prune_rel = c.prune_rel;
    drv = q_inter_hl_fpl_set(g, fHrec, fLrec, c.finter, e3, of);
  }
  double m[3] = {0.0, 0.0, 0.0};
  for (int q = 0; q < 3; ++q) {
    for (std::size_t i = 0; i < nn; ++i) m[q] += 0.5 * norm2(g.node(i)) * drv[q][i];
    m[q] *= g.cell_volume();
  }
  return (m[0] + m[1] - 2.0 * m[2]) / (2.0 * eps * eps);
}

void step_f1(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c,
             const DistField& fL0_next, const DistField& fH0_next,
             const MomentVector& momL_next, const MomentVector& momH_next, DistField& fL1_next,
             DistField& fH1_next) {
  const double eps = s.eps;
  const double a2 = c.dt / (eps * eps);
  const double a1 = c.dt / eps;
  const std::size_t nn = g.size();
  const double nH = momH_next.p0;

  const GatherSpec refLn = ref_of(s.momL0, c.weighted_interp);
  const GatherSpec refHn = ref_of(s.momH0, c.weighted_interp);
  const GatherSpec refLx = ref_of(momL_next, c.weighted_interp);
  const GatherSpec refHx = ref_of(momH_next, c.weighted_interp);

  DistField sumL(nn), difL(nn), sumH(nn), difH(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    sumL[i] = s.fL0[i] + s.fL1[i];
    difL[i] = s.fL0[i] - s.fL1[i];
    sumH[i] = s.fH0[i] + s.fH1[i];
    difH[i] = s.fH0[i] - s.fH1[i];
  }

  const double phiT = c.project_invariants
                          ? exchange_ledger(g, s, c, fL0_next, fH0_next,
                                            ref_of(momL_next, c.weighted_interp),
                                            ref_of(momH_next, c.weighted_interp))
                          : 0.0;

  // ---- light species -------------------------------------------------
  DistField EL(nn, 0.0);
  double muL = 0.0, mu_q0 = 0.0;
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts ob;
    ob.sphere_order = c.sphere_order;
    ob.prune_rel = c.prune_rel;
    ob.taylor_eps_max = c.taylor_eps_max;

    // (1/eps)(Q_eps - Q_0)(fL0^{n+1}, fH0^{n+1}) from one fused quadrature
    ob.gather_f = refLx;
    ob.gather_g = refHx;
    const double e0[2] = {eps, 0.0};
    const auto pair0 = q_inter_lh_set(g, fL0_next, fH0_next, c.inter, e0, ob);

    // cross terms; signed f1 arguments are gathered plainly (dividing them
    // by a reference Maxwellian amplifies tail noise exponentially)
    const double e1[1] = {eps};
    BoltzOpts oc1 = ob;
    oc1.gather_f = refLn;
    oc1.gather_g = {};
    const auto cross1 = q_inter_lh_set(g, s.fL0, s.fH1, c.inter, e1, oc1);
    // the (Q_eps - Q_0)(fL1^n, fH0^n) pair recombines with the explicit part
    // of the q0 linear penalty into Q_eps(fL1^n, fH0^n) + nH mu' fL1^n
    BoltzOpts op1 = ob;
    op1.gather_f = {};
    op1.gather_g = refHn;
    const auto pair1 = q_inter_lh_set(g, s.fL1, s.fH0, c.inter, e1, op1);
    BoltzOpts opp = ob;
    opp.gather_f = {};
    opp.gather_g = {};
    const auto cross11 = q_inter_lh_set(g, s.fL1, s.fH1, c.inter, e1, opp);

    BoltzOpts oi = ob;
    oi.gather_f = refLn;
    oi.gather_g = refLn;
    oi.conserve_project = c.conserve_intra;
    const DistField Qp = q_intra(g, sumL, sumL, c.intra_L, oi);
    const DistField Qm = q_intra(g, difL, difL, c.intra_L, oi);
    const DistField Q11 = q_intra(g, s.fL1, s.fL1, c.intra_L, oi);

    mu_q0 = nH * linear_mu(g, MuMode::boltzmann_q0, c.inter, c.finter, nullptr);
    const double lossP = linear_mu(g, MuMode::boltzmann_loss, c.intra_L, c.fintra_L, &sumL);
    const double lossM = linear_mu(g, MuMode::boltzmann_loss, c.intra_L, c.fintra_L, &difL);
    muL = c.pen.mu_margin * std::max(lossP, lossM);

    for (std::size_t i = 0; i < nn; ++i) {
      EL[i] = (pair0[0][i] - pair0[1][i]) / eps + 0.5 * (Qp[i] - Qm[i]) + eps * Q11[i] +
              cross1[0][i] + pair1[0][i] + eps * cross11[0][i];
    }
    // implicit: (1 + a2 (muL + nH mu')) fL1' = fL1 + a2 (EL + (muL + nH mu') fL1)
    const double denom = 1.0 + a2 * (muL + mu_q0);
    fL1_next.assign(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i)
      fL1_next[i] = (s.fL1[i] + a2 * (EL[i] + (muL + mu_q0) * s.fL1[i])) / denom;
  } else {
    FPLOpts of;
    of.prune_rel = c.prune_rel;
    const double e0[2] = {eps, 0.0};
    const auto pair0 = q_inter_lh_fpl_set(g, fL0_next, fH0_next, c.finter, e0, of);
    const double e1[1] = {eps};
    const auto cross1 = q_inter_lh_fpl_set(g, s.fL0, s.fH1, c.finter, e1, of);
    const auto pair1 = q_inter_lh_fpl_set(g, s.fL1, s.fH0, c.finter, e0, of);
    const auto cross11 = q_inter_lh_fpl_set(g, s.fL1, s.fH1, c.finter, e1, of);
    FPLOpts oi = of;
    oi.conserve_project = c.conserve_intra;
    const DistField Qp = q_intra_fpl(g, sumL, c.fintra_L, oi);
    const DistField Qm = q_intra_fpl(g, difL, c.fintra_L, oi);
    const DistField Q11 = q_intra_fpl(g, s.fL1, c.fintra_L, oi);
    const double lossP = linear_mu(g, MuMode::fpl, c.intra_L, c.fintra_L, &sumL);
    const double lossM = linear_mu(g, MuMode::fpl, c.intra_L, c.fintra_L, &difL);
    muL = c.pen.mu_margin * std::max(lossP, lossM);
    for (std::size_t i = 0; i < nn; ++i) {
      EL[i] = (pair0[0][i] - pair0[1][i]) / eps + 0.5 * (Qp[i] - Qm[i]) + eps * Q11[i] +
              cross1[0][i] + (pair1[0][i] - pair1[1][i]) + eps * cross11[0][i];
    }
    // (I + a2 (muL I - nH Lq0)) fL1' = fL1 + a2 (EL + muL fL1), CG on the
    // symmetric negative-semidefinite q0 operator
    DistField b(nn);
    for (std::size_t i = 0; i < nn; ++i) b[i] = s.fL1[i] + a2 * (EL[i] + muL * s.fL1[i]);
    auto apply = [&](const DistField& x) {
      DistField Lx = apply_q0_sym_fpl(g, x, c.finter);
      DistField out(nn);
      for (std::size_t i = 0; i < nn; ++i) out[i] = x[i] + a2 * (muL * x[i] - nH * Lx[i]);
      return out;
    };
    fL1_next = s.fL1;  // warm start
    conjugate_gradient(apply, b, fL1_next, c.pen.cg_tol, c.pen.cg_max_iter);
  }
  if (c.project_invariants) {
    // collision terms carry exactly zero mass; the energy row is paired
    // against the heavy species through the shared exchange ledger
    const MomPair mb = field_moments(g, s.fL1);
    set_mass_energy(g, fL1_next, ref_of(momL_next, true), mb.p0, mb.p2 - a1 * phiT);
  }

  // ---- heavy species -------------------------------------------------
  DistField EH(nn, 0.0);
  double muH = 0.0;
  if (c.model == CollisionModel::boltzmann) {
    BoltzOpts ob;
    ob.sphere_order = c.sphere_order;
    ob.prune_rel = c.prune_rel;
    ob.taylor_eps_max = c.taylor_eps_max;
    ob.gather_f = refHx;  // first argument fH
    ob.gather_g = refLx;
    const double e3[3] = {eps, -eps, 0.0};
    const double epm[2] = {eps, -eps};
    // the O(1) exchange driver: [lit(+e) + lit(-e) - 2 lit(0)] / (2 e^2)
    const auto drv = q_inter_hl_set(g, fH0_next, fL0_next, c.inter, e3, ob);
    // symmetric slopes of the literal quadrature stand in for (1/eps) Q^{HL}
    BoltzOpts oa = ob;
    oa.gather_g = {};
    const auto slopeA = q_inter_hl_set(g, fH0_next, fL1_next, c.inter, epm, oa);
    BoltzOpts obn = ob;
    obn.gather_f = {};
    obn.gather_g = refLn;
    const auto slopeB = q_inter_hl_set(g, s.fH1, s.fL0, c.inter, epm, obn);
    BoltzOpts opp = ob;
    opp.gather_f = {};
    opp.gather_g = {};
    const auto slopeC = q_inter_hl_set(g, s.fH1, s.fL1, c.inter, epm, opp);

    BoltzOpts oi = ob;
    oi.gather_f = refHn;
    oi.gather_g = refHn;
    oi.conserve_project = c.conserve_intra;
    const DistField Qp = q_intra(g, sumH, sumH, c.intra_H, oi);
    const DistField Qm = q_intra(g, difH, difH, c.intra_H, oi);
    const DistField Q11 = q_intra(g, s.fH1, s.fH1, c.intra_H, oi);

    const double lossP = linear_mu(g, MuMode::boltzmann_loss, c.intra_H, c.fintra_H, &sumH);
    const double lossM = linear_mu(g, MuMode::boltzmann_loss, c.intra_H, c.fintra_H, &difH);
    muH = c.pen.mu_margin * std::max(lossP, lossM);

    const double i2e2 = 1.0 / (2.0 * eps * eps);
    const double i2e = 1.0 / (2.0 * eps);
    for (std::size_t i = 0; i < nn; ++i) {
      const double driver = (drv[0][i] + drv[1][i] - 2.0 * drv[2][i]) * i2e2;
      const double sA = (slopeA[0][i] - slopeA[1][i]) * i2e;
      const double sB = (slopeB[0][i] - slopeB[1][i]) * i2e;
      const double sC = (slopeC[0][i] - slopeC[1][i]) * i2e;
      EH[i] = driver + 0.5 * (Qp[i] - Qm[i]) + eps * Q11[i] + sA + sB + eps * sC;
    }
  } else {
    FPLOpts of;
    of.prune_rel = c.prune_rel;
    const double e3[3] = {eps, -eps, 0.0};
    const double epm[2] = {eps, -eps};
    const auto drv = q_inter_hl_fpl_set(g, fH0_next, fL0_next, c.finter, e3, of);
    const auto slopeA = q_inter_hl_fpl_set(g, fH0_next, fL1_next, c.finter, epm, of);
    const auto slopeB = q_inter_hl_fpl_set(g, s.fH1, s.fL0, c.finter, epm, of);
    const auto slopeC = q_inter_hl_fpl_set(g, s.fH1, s.fL1, c.finter, epm, of);
    FPLOpts oi = of;
    oi.conserve_project = c.conserve_intra;
    const DistField Qp = q_intra_fpl(g, sumH, c.fintra_H, oi);
    const DistField Qm = q_intra_fpl(g, difH, c.fintra_H, oi);
    const DistField Q11 = q_intra_fpl(g, s.fH1, c.fintra_H, oi);
    const double lossP = linear_mu(g, MuMode::fpl, c.intra_H, c.fintra_H, &sumH);
    const double lossM = linear_mu(g, MuMode::fpl, c.intra_H, c.fintra_H, &difH);
    muH = c.pen.mu_margin * std::max(lossP, lossM);
    const double i2e2 = 1.0 / (2.0 * eps * eps);
    const double i2e = 1.0 / (2.0 * eps);
    for (std::size_t i = 0; i < nn; ++i) {
      const double driver = (drv[0][i] + drv[1][i] - 2.0 * drv[2][i]) * i2e2;
      const double sA = (slopeA[0][i] - slopeA[1][i]) * i2e;
      const double sB = (slopeB[0][i] - slopeB[1][i]) * i2e;
      const double sC = (slopeC[0][i] - slopeC[1][i]) * i2e;
      EH[i] = driver + 0.5 * (Qp[i] - Qm[i]) + eps * Q11[i] + sA + sB + eps * sC;
    }
  }
  const double denomH = 1.0 + a1 * muH;
  fH1_next.assign(nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    fH1_next[i] = (s.fH1[i] + a1 * (EH[i] + muH * s.fH1[i])) / denomH;
  if (c.project_invariants) {
    const MomPair mb = field_moments(g, s.fH1);
    set_mass_energy(g, fH1_next, ref_of(momH_next, true), mb.p0, mb.p2 + a1 * phiT);
  }
}

SplitState ap_step(const VelocityGrid& g, const SplitState& s, const SchemeConfig& c) {
  SplitState out = s;
  const MomentVector momL = update_moments_L0(g, s, c);
  const MomentVector momH = update_moments_H0(g, s, c);
  step_f0(g, s, c, momL, momH, out.fL0, out.fH0);
  step_f1(g, s, c, out.fL0, out.fH0, momL, momH, out.fL1, out.fH1);
  out.momL0 = momL;
  out.momH0 = momH;
  out.t = s.t + c.dt;
  return out;
}

void reconstruct(const SplitState& s, DistField& fL, DistField& fH) {
  fL.resize(s.fL0.size());
  fH.resize(s.fH0.size());
  for (std::size_t i = 0; i < fL.size(); ++i) {
    fL[i] = s.fL0[i] + s.eps * s.fL1[i];
    fH[i] = s.fH0[i] + s.eps * s.fH1[i];
  }
}

}  // namespace dmx
