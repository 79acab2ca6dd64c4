#include "dmx/fpl.hpp"

#include "dmx/boltzmann.hpp"
#include <algorithm>
#include <cmath>

#include "dmx/threading.hpp"

namespace dmx {

namespace {

inline double bmag_fpl(double w2, double gamma, double delta2) {
  return 0.5 * std::pow(w2 + delta2, 0.5 * (gamma + 2.0));
}

// W(w) x = B(w) S(w) x with S = Id - w w^T / (|w|^2 + delta^2)
inline Vec3 apply_BS(const Vec3& w, const Vec3& x, double gamma, double delta2) {
  const double w2 = norm2(w);
  const double B = bmag_fpl(w2, gamma, delta2);
  const double proj = dot(w, x) / (w2 + delta2);
  return B * (x - proj * w);
}

double max_abs(const DistField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

DistField divergence_adjoint(const VelocityGrid& g, const std::vector<Vec3>& flux) {
  const int n = g.n();
  const double i1 = 1.0 / g.dv();
  const double i2 = 0.5 * i1;
  DistField out(g.size(), 0.0);
  // out = -G^T flux, axis by axis
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          auto comp = [&](int t) {
            int c[3] = {i, j, k};
            c[a] = t;
            return flux[g.index(c[0], c[1], c[2])][a];
          };
          const int t = (a == 0) ? i : (a == 1) ? j : k;
          double gt;  // (G^T flux)_t along axis a
          if (t == 0)
            gt = -comp(0) * i1 - comp(1) * i2;
          else if (t == 1)
            gt = comp(0) * i1 - comp(2) * i2;
          else if (t == n - 2)
            gt = comp(n - 3) * i2 - comp(n - 1) * i1;
          else if (t == n - 1)
            gt = comp(n - 2) * i2 + comp(n - 1) * i1;
          else
            gt = (comp(t - 1) - comp(t + 1)) * i2;
          out[g.index(i, j, k)] -= gt;
        }
      }
    }
  }
  return out;
}

DistField q_intra_fpl(const VelocityGrid& g, const DistField& f, const FPLKernel& k,
                      const FPLOpts& o) {
  const double delta2 = fpl_delta(k, g) * fpl_delta(k, g);
  const std::vector<Vec3> gf = gradient_central(g, f);
  const double prune = o.prune_rel > 0.0 ? o.prune_rel * max_abs(f) * max_abs(f) : -1.0;
  const std::size_t nn = g.size();
  std::vector<Vec3> flux(nn);
  parallel_for(nn, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 v = g.node(i);
      Vec3 acc;
      for (std::size_t j = 0; j < nn; ++j) {
        if (prune >= 0.0 && std::abs(f[i] * f[j]) <= prune &&
            std::abs(f[i]) * norm(gf[j]) + std::abs(f[j]) * norm(gf[i]) <= prune)
          continue;
        const Vec3 w = v - g.node(j);
        const Vec3 integrand = gf[i] * f[j] - gf[j] * f[i];
        acc += apply_BS(w, integrand, k.gamma, delta2);
      }
      flux[i] = acc * g.cell_volume();
    }
  });
  DistField out = divergence_adjoint(g, flux);
  if (o.conserve_project) project_collision_invariants(g, out);
  return out;
}

DistField apply_q0_sym_fpl(const VelocityGrid& g, const DistField& h, const FPLKernel& k) {
  const double delta2 = fpl_delta(k, g) * fpl_delta(k, g);
  const std::vector<Vec3> gh = gradient_central(g, h);
  std::vector<Vec3> flux(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) flux[i] = apply_BS(g.node(i), gh[i], k.gamma, delta2);
  return divergence_adjoint(g, flux);
}

DistField q0_lh_fpl(const VelocityGrid& g, const DistField& fL, double nH, const FPLKernel& k) {
  if (nH < 0.0) throw invalid_parameter("q0_lh_fpl: nH must be nonnegative");
  DistField out = apply_q0_sym_fpl(g, fL, k);
  for (double& x : out) x *= nH;
  return out;
}

DistField q0_hl_fpl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                    const FPLKernel& k) {
  const double delta2 = fpl_delta(k, g) * fpl_delta(k, g);
  Vec3 D;
  for (std::size_t i = 0; i < fL.size(); ++i) {
    const Vec3 v = g.node(i);
    const double r2 = norm2(v);
    D += (bmag_fpl(r2, k.gamma, delta2) / (r2 + delta2) * fL[i]) * v;
  }
  D = D * g.cell_volume();
  const std::vector<Vec3> gh = gradient_central(g, fH);
  DistField out(fH.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -2.0 * dot(gh[i], D);
  return out;
}

namespace {

std::vector<DistField> inter_fpl_set(const VelocityGrid& g, const DistField& fL,
                                     const DistField& fH, const FPLKernel& k,
                                     std::span<const double> eps, const FPLOpts& o, bool heavy) {
  const double delta2 = fpl_delta(k, g) * fpl_delta(k, g);
  const std::vector<Vec3> gL = gradient_central(g, fL);
  const std::vector<Vec3> gH = gradient_central(g, fH);
  const double prune = o.prune_rel > 0.0 ? o.prune_rel * max_abs(fL) * max_abs(fH) : -1.0;
  const std::size_t nn = g.size();
  const std::size_t ne = eps.size();
  std::vector<std::vector<Vec3>> flux(ne, std::vector<Vec3>(nn));
  parallel_for(nn, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 vi = g.node(i);
      for (std::size_t q = 0; q < ne; ++q) flux[q][i] = Vec3{};
      for (std::size_t j = 0; j < nn; ++j) {
        const std::size_t iL = heavy ? j : i;
        const std::size_t iH = heavy ? i : j;
        if (prune >= 0.0) {
          const double sl = std::abs(fL[iL]) + norm(gL[iL]);
          const double sh = std::abs(fH[iH]) + norm(gH[iH]);
          if (sl * sh <= prune) continue;
        }
        const Vec3 vL = heavy ? g.node(j) : vi;
        const Vec3 vH = heavy ? vi : g.node(j);
        for (std::size_t q = 0; q < ne; ++q) {
          const double ep = eps[q];
          const Vec3 wrel = vL - ep * vH;
          const Vec3 integrand = gL[iL] * fH[iH] - (ep * fL[iL]) * gH[iH];
          flux[q][i] += apply_BS(wrel, integrand, k.gamma, delta2);
        }
      }
      for (std::size_t q = 0; q < ne; ++q) flux[q][i] = flux[q][i] * g.cell_volume();
    }
  });
  std::vector<DistField> out;
  out.reserve(ne);
  for (std::size_t q = 0; q < ne; ++q) out.push_back(divergence_adjoint(g, flux[q]));
  return out;
}

}  // namespace

std::vector<DistField> q_inter_lh_fpl_set(const VelocityGrid& g, const DistField& fL,
                                          const DistField& fH, const FPLKernel& k,
                                          std::span<const double> eps, const FPLOpts& o) {
  return inter_fpl_set(g, fL, fH, k, eps, o, false);
}

std::vector<DistField> q_inter_hl_fpl_set(const VelocityGrid& g, const DistField& fH,
                                          const DistField& fL, const FPLKernel& k,
                                          std::span<const double> eps, const FPLOpts& o) {
  return inter_fpl_set(g, fL, fH, k, eps, o, true);
}

DistField q_inter_lh_eps_fpl(const VelocityGrid& g, const DistField& fL, const DistField& fH,
                             double eps, const FPLKernel& k, const FPLOpts& o) {
  if (!(eps > 0.0)) throw invalid_parameter("q_inter_lh_eps_fpl: eps must be positive");
  const double e[1] = {eps};
  return q_inter_lh_fpl_set(g, fL, fH, k, e, o)[0];
}

DistField q_inter_hl_eps_fpl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                             double eps, const FPLKernel& k, const FPLOpts& o) {
  if (!(eps > 0.0)) throw invalid_parameter("q_inter_hl_eps_fpl: eps must be positive");
  const double e[1] = {eps};
  DistField out = q_inter_hl_fpl_set(g, fH, fL, k, e, o)[0];
  const double inv = 1.0 / eps;
  for (double& x : out) x *= inv;
  return out;
}

}  // namespace dmx
