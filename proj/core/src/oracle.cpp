#include "dmx/oracle.hpp"

#include <cmath>

namespace dmx {

double lambda_of_T(const VelocityGrid& g, int sphere_order, double T, CollisionModel model,
                   const BoltzKernel& bk, const FPLKernel& fk) {
  if (!(T > 0.0)) throw invalid_parameter("lambda_of_T: T must be positive");
  const DistField M = maxwellian(g, 1.0, Vec3{}, T);
  if (model == CollisionModel::fpl) {
    const double d2 = fpl_delta(fk, g) * fpl_delta(fk, g);
    double s = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
      const double w2 = norm2(g.node(i));
      s += 0.5 * std::pow(w2 + d2, 0.5 * (fk.gamma + 2.0)) * M[i];
    }
    return (2.0 / 3.0) * s * g.cell_volume();
  }
  const SphereRule rule = sphere_rule(sphere_order);
  const double d2 = bk.gamma < 0.0 ? boltz_delta(bk, g) * boltz_delta(bk, g) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i) {
    const Vec3 w = g.node(i);
    const double w2 = norm2(w);
    const double r = std::sqrt(w2);
    const double B = bk.gamma == 0.0 ? 0.5 : 0.5 * std::pow(w2 + d2, 0.5 * bk.gamma);
    double ang = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double c = r > 0.0 ? dot(w, rule.dir[q]) / r : 0.0;
      ang += rule.wgt[q] * (1.0 + c) * (1.0 - c);
    }
    s += B * bk.b0 * ang * w2 * M[i];
  }
  return s * g.cell_volume() / 3.0;
}

MacroState relax_step_implicit(const MacroState& m, double dt, const VelocityGrid& g,
                               CollisionModel model, const BoltzKernel& bk, const FPLKernel& fk,
                               const RelaxOpts& o) {
  MacroState out = m;
  out.t = m.t + dt;
  double TL = m.T_L, TH = m.T_H;
  for (int it = 0; it < o.max_iter; ++it) {
    const double lam = lambda_of_T(g, o.sphere_order, TL, model, bk, fk);
    // dT_L/dt = -2 lam/T_L n_H (T_L - T_H); both rows share the coefficient,
    // so the exact solve at frozen lam conserves n_L T_L + n_H T_H algebraically
    const double kf = 2.0 * dt * lam / TL;
    const double a = kf * m.n_H / (1.0 + kf * m.n_H);
    const double TL0 = m.T_L / (1.0 + kf * m.n_H);
    const double b = kf * m.n_L / (1.0 + kf * m.n_L);
    const double TH0 = m.T_H / (1.0 + kf * m.n_L);
    double TLnew = (TL0 + a * TH0) / (1.0 - a * b);
    double THnew = TH0 + b * TLnew;
    TLnew = TL + o.damping * (TLnew - TL);
    THnew = TH + o.damping * (THnew - TH);
    const double change = std::abs(TLnew - TL) + std::abs(THnew - TH);
    TL = TLnew;
    TH = THnew;
    if (change < o.fixed_point_tol * (std::abs(TL) + std::abs(TH))) {
      out.T_L = TL;
      out.T_H = TH;
      return out;
    }
  }
  throw solver_error("relax_step_implicit: no convergence");
}

std::vector<MacroState> solve_relaxation(const MacroState& m0, double dt, double t_end,
                                         const VelocityGrid& g, CollisionModel model,
                                         const BoltzKernel& bk, const FPLKernel& fk,
                                         const RelaxOpts& o) {
  std::vector<MacroState> series{m0};
  MacroState m = m0;
  const int steps = t_end > 0.0 ? static_cast<int>(std::llround(t_end / dt)) : 0;
  for (int s = 0; s < steps; ++s) {
    m = relax_step_implicit(m, dt, g, model, bk, fk, o);
    series.push_back(m);
  }
  return series;
}

namespace {

struct Rhs {
  DistField dL, dH;
};

Rhs unsplit_rhs(const VelocityGrid& g, const DistField& fL, const DistField& fH, double eps,
                CollisionModel model, const BoltzKernel& iL, const BoltzKernel& iH,
                const BoltzKernel& inter, const FPLKernel& fiL, const FPLKernel& fiH,
                const FPLKernel& finter, const RK4Opts& o) {
  BoltzOpts ob = o.boltz;
  FPLOpts of = o.fpl;
  if (o.weighted_interp) {
    const Moments mL = compute_macro(g, fL);
    const Moments mH = compute_macro(g, fH);
    ob.gather_f = {true, mL.n, mL.u, mL.T};
    ob.gather_g = {true, mH.n, mH.u, mH.T};
  }
  Rhs r;
  const double e[1] = {eps};
  if (model == CollisionModel::boltzmann) {
    BoltzOpts oL = ob;
    oL.gather_g = ob.gather_f;
    r.dL = q_intra(g, fL, fL, iL, oL);
    BoltzOpts oH = ob;
    oH.gather_f = ob.gather_g;
    r.dH = q_intra(g, fH, fH, iH, oH);
    const DistField qlh = q_inter_lh_set(g, fL, fH, inter, e, ob)[0];
    BoltzOpts ohl = ob;
    ohl.gather_f = ob.gather_g;  // first argument is fH
    ohl.gather_g = ob.gather_f;
    const DistField qhl = q_inter_hl_set(g, fH, fL, inter, e, ohl)[0];
    const double ai = 1.0 / (eps * eps);
    const double bi = 1.0 / eps;
    for (std::size_t i = 0; i < r.dL.size(); ++i) {
      r.dL[i] = ai * (r.dL[i] + qlh[i]);
      // Q^{HL} carries an extra 1/eps on top of the literal quadrature
      r.dH[i] = bi * (r.dH[i] + bi * qhl[i]);
    }
  } else {
    r.dL = q_intra_fpl(g, fL, fiL, of);
    r.dH = q_intra_fpl(g, fH, fiH, of);
    const DistField qlh = q_inter_lh_fpl_set(g, fL, fH, finter, e, of)[0];
    const DistField qhl = q_inter_hl_fpl_set(g, fH, fL, finter, e, of)[0];
    const double ai = 1.0 / (eps * eps);
    const double bi = 1.0 / eps;
    for (std::size_t i = 0; i < r.dL.size(); ++i) {
      r.dL[i] = ai * (r.dL[i] + qlh[i]);
      r.dH[i] = bi * (r.dH[i] + bi * qhl[i]);
    }
  }
  return r;
}

}  // namespace

void reference_rk4_step(const VelocityGrid& g, DistField& fL, DistField& fH, double eps,
                        double dt, CollisionModel model, const BoltzKernel& intra_L,
                        const BoltzKernel& intra_H, const BoltzKernel& inter,
                        const FPLKernel& fintra_L, const FPLKernel& fintra_H,
                        const FPLKernel& finter, const RK4Opts& o) {
  if (!(dt <= o.stability_c * eps * eps))
    throw solver_error("reference_rk4_step: stability-violation, dt > c eps^2");
  const std::size_t n = fL.size();
  auto axpy = [n](const DistField& f, double a, const DistField& d) {
    DistField out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f[i] + a * d[i];
    return out;
  };
  const Rhs k1 = unsplit_rhs(g, fL, fH, eps, model, intra_L, intra_H, inter, fintra_L, fintra_H,
                             finter, o);
  const DistField fL2 = axpy(fL, 0.5 * dt, k1.dL), fH2 = axpy(fH, 0.5 * dt, k1.dH);
  const Rhs k2 = unsplit_rhs(g, fL2, fH2, eps, model, intra_L, intra_H, inter, fintra_L,
                             fintra_H, finter, o);
  const DistField fL3 = axpy(fL, 0.5 * dt, k2.dL), fH3 = axpy(fH, 0.5 * dt, k2.dH);
  const Rhs k3 = unsplit_rhs(g, fL3, fH3, eps, model, intra_L, intra_H, inter, fintra_L,
                             fintra_H, finter, o);
  const DistField fL4 = axpy(fL, dt, k3.dL), fH4 = axpy(fH, dt, k3.dH);
  const Rhs k4 = unsplit_rhs(g, fL4, fH4, eps, model, intra_L, intra_H, inter, fintra_L,
                             fintra_H, finter, o);
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    fL[i] += c * (k1.dL[i] + 2.0 * k2.dL[i] + 2.0 * k3.dL[i] + k4.dL[i]);
    fH[i] += c * (k1.dH[i] + 2.0 * k2.dH[i] + 2.0 * k3.dH[i] + k4.dH[i]);
  }
}

}  // namespace dmx
