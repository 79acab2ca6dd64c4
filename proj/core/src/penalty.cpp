#include "dmx/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace dmx {

double bgk_beta(const DistField& f, const DistField& M, const DistField& Qf,
                const PenaltyConfig& cfg, const DistField* f_prev, const DistField* Qf_prev) {
  double mmax = 0.0;
  for (double v : M) mmax = std::max(mmax, std::abs(v));
  const double floor = cfg.bgk_floor_rel * mmax;
  double beta = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - M[i];
    if (std::abs(d) > floor) beta = std::max(beta, std::abs(Qf[i] / d));
  }
  if (beta > 0.0) return beta;
  if (f_prev && Qf_prev) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = f[i] - (*f_prev)[i];
      if (std::abs(d) > floor) beta = std::max(beta, std::abs((Qf[i] - (*Qf_prev)[i]) / d));
    }
    if (beta > 0.0) return beta;
  }
  return cfg.default_beta;
}

DistField bgk_implicit_update(const DistField& rhs, const DistField& M_next, double c) {
  if (c < 0.0) throw invalid_parameter("bgk_implicit_update: c must be nonnegative");
  DistField out(rhs.size());
  const double inv = 1.0 / (1.0 + c);
  for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = (rhs[i] + c * M_next[i]) * inv;
  return out;
}

double sym3_spectral_radius(const double a[3][3]) {
  // trigonometric closed form for symmetric 3x3 eigenvalues
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  double b[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = a[i][j] - (i == j ? q : 0.0);
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p2 += b[i][j] * b[i][j];
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) return std::abs(q);
  const double det =
      b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  double r = det / (2.0 * p * p * p);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return std::max(std::abs(e1), std::abs(e3));
}

double linear_mu(const VelocityGrid& g, MuMode mode, const BoltzKernel& bk, const FPLKernel& fk,
                 const DistField* gfield) {
  switch (mode) {
    case MuMode::boltzmann_q0: {
      // int B(v, sigma) dsigma = 2 pi b0 |v|^gamma for the forward-weighted family
      const SphereRule rule = sphere_rule(4);
      const double d2 = bk.gamma < 0.0 ? boltz_delta(bk, g) * boltz_delta(bk, g) : 0.0;
      double mu = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 v = g.node(i);
        const double r2 = norm2(v);
        const double r = std::sqrt(r2);
        const double B = bk.gamma == 0.0 ? 0.5 : 0.5 * std::pow(r2 + d2, 0.5 * bk.gamma);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double c = r > 0.0 ? dot(v, rule.dir[q]) / r : 0.0;
          s += rule.wgt[q] * (1.0 + c);
        }
        mu = std::max(mu, bk.b0 * B * s);
      }
      return mu;
    }
    case MuMode::boltzmann_loss: {
      if (!gfield) throw invalid_parameter("linear_mu: loss mode needs a field");
      // Q^-(g)(v) = 4 pi sum_w wgt B(|v - w|) g(w) for isotropic b
      const double d2 = bk.gamma < 0.0 ? boltz_delta(bk, g) * boltz_delta(bk, g) : 0.0;
      double mu = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 v = g.node(i);
        double s = 0.0;
        for (std::size_t j = 0; j < gfield->size(); ++j) {
          const double w2 = norm2(v - g.node(j));
          const double B = bk.gamma == 0.0 ? 0.5 : 0.5 * std::pow(w2 + d2, 0.5 * bk.gamma);
          s += B * (*gfield)[j];
        }
        mu = std::max(mu, 4.0 * M_PI * bk.b0 * s * g.cell_volume());
      }
      return mu;
    }
    case MuMode::fpl: {
      if (!gfield) throw invalid_parameter("linear_mu: fpl mode needs a field");
      const double d2 = fpl_delta(fk, g) * fpl_delta(fk, g);
      double mu = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 v = g.node(i);
        double D[3][3] = {};
        for (std::size_t j = 0; j < gfield->size(); ++j) {
          const Vec3 w = v - g.node(j);
          const double w2 = norm2(w);
          const double B = 0.5 * std::pow(w2 + d2, 0.5 * (fk.gamma + 2.0));
          const double c = (*gfield)[j] * B;
          const double inv = 1.0 / (w2 + d2);
          D[0][0] += c * (1.0 - w.x * w.x * inv);
          D[1][1] += c * (1.0 - w.y * w.y * inv);
          D[2][2] += c * (1.0 - w.z * w.z * inv);
          D[0][1] += c * (-w.x * w.y * inv);
          D[0][2] += c * (-w.x * w.z * inv);
          D[1][2] += c * (-w.y * w.z * inv);
        }
        D[1][0] = D[0][1];
        D[2][0] = D[0][2];
        D[2][1] = D[1][2];
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) D[a][b] *= g.cell_volume();
        mu = std::max(mu, 0.5 * sym3_spectral_radius(D));
      }
      return mu;
    }
  }
  throw invalid_parameter("linear_mu: unknown mode");
}

DistField fp_ptilde_apply(const VelocityGrid& g, const DistField& h, const DistField& sqrtM) {
  const int n = g.n();
  const double idv2 = 1.0 / (g.dv() * g.dv());
  DistField out(h.size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          int c[3] = {i, j, k};
          const int t = c[a];
          const std::size_t idx = g.index(i, j, k);
          auto at = [&](int tt) {
            int cc[3] = {i, j, k};
            cc[a] = tt;
            return g.index(cc[0], cc[1], cc[2]);
          };
          const double s0 = sqrtM[idx];
          const double sp = t + 1 < n ? sqrtM[at(t + 1)] : 0.0;
          const double sm = t - 1 >= 0 ? sqrtM[at(t - 1)] : 0.0;
          const double hp = t + 1 < n ? h[at(t + 1)] : 0.0;
          const double hm = t - 1 >= 0 ? h[at(t - 1)] : 0.0;
          out[idx] += idv2 * (hp - (sp + sm) / s0 * h[idx] + hm);
        }
      }
    }
  }
  return out;
}

DistField fp_penalty_apply(const VelocityGrid& g, const DistField& f, const DistField& M) {
  DistField sq(M.size()), h(M.size());
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (!(M[i] > 0.0)) throw invalid_parameter("fp_penalty_apply: M must be positive");
    sq[i] = std::sqrt(M[i]);
    h[i] = f[i] / sq[i];
  }
  DistField out = fp_ptilde_apply(g, h, sq);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sq[i];
  return out;
}

int conjugate_gradient(const std::function<DistField(const DistField&)>& apply,
                       const DistField& b, DistField& x, double tol, int max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  DistField r = apply(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  DistField p = r;
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rr += r[i] * r[i];
    bb += b[i] * b[i];
  }
  const double stop2 = tol * tol * (bb > 0.0 ? bb : 1.0);
  if (rr <= stop2) return 0;
  for (int it = 1; it <= max_iter; ++it) {
    const DistField Ap = apply(p);
    double pAp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    const double alpha = rr / pAp;
    double rr2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rr2 += r[i] * r[i];
    }
    if (rr2 <= stop2) return it;
    const double beta = rr2 / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr2;
  }
  throw solver_error("conjugate_gradient: no convergence");
}

DistField fp_implicit_solve(const VelocityGrid& g, const DistField& rhs, const DistField& M_next,
                            double c, const PenaltyConfig& cfg) {
  if (c < 0.0) throw invalid_parameter("fp_implicit_solve: c must be nonnegative");
  if (c == 0.0) return rhs;
  DistField sq(M_next.size());
  for (std::size_t i = 0; i < M_next.size(); ++i) {
    if (!(M_next[i] > 0.0)) throw invalid_parameter("fp_implicit_solve: M must be positive");
    sq[i] = std::sqrt(M_next[i]);
  }
  DistField b(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) b[i] = rhs[i] / sq[i];
  auto apply = [&](const DistField& h) {
    DistField Ph = fp_ptilde_apply(g, h, sq);
    for (std::size_t i = 0; i < Ph.size(); ++i) Ph[i] = h[i] - c * Ph[i];
    return Ph;
  };
  DistField h = b;  // warm start at rhs
  conjugate_gradient(apply, b, h, cfg.cg_tol, cfg.cg_max_iter);
  DistField out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * sq[i];
  return out;
}

}  // namespace dmx
