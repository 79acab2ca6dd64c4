#include "dmx/boltzmann.hpp"

#include <algorithm>
#include <cmath>

#include "dmx/threading.hpp"

namespace dmx {

namespace {

double max_abs(const DistField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

// kernel magnitude 0.5 (|w|^2 + delta^2)^(gamma/2); the (1+eps^2) prefactors
// of the appendix forms cancel against the scaled |w| arguments exactly
inline double bmag(double w2, double gamma, double delta2) {
  if (gamma == 0.0) return 0.5;
  return 0.5 * std::pow(w2 + delta2, 0.5 * gamma);
}

}  // namespace

void project_collision_invariants(const VelocityGrid& g, DistField& q) {
  // basis 1, vx, vy, vz, |v|^2; remove Gram-solved combination
  const std::size_t nn = q.size();
  double m[5] = {0, 0, 0, 0, 0};
  double G[5][5] = {};
  for (std::size_t i = 0; i < nn; ++i) {
    const Vec3 v = g.node(i);
    const double psi[5] = {1.0, v.x, v.y, v.z, norm2(v)};
    for (int a = 0; a < 5; ++a) {
      m[a] += psi[a] * q[i];
      for (int b = a; b < 5; ++b) G[a][b] += psi[a] * psi[b];
    }
  }
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < a; ++b) G[a][b] = G[b][a];
  // solve G c = m (5x5, Gauss with partial pivot)
  double A[5][6];
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) A[a][b] = G[a][b];
    A[a][5] = m[a];
  }
  for (int c = 0; c < 5; ++c) {
    int p = c;
    for (int r = c + 1; r < 5; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap_ranges(A[c], A[c] + 6, A[p]);
    for (int r = 0; r < 5; ++r) {
      if (r == c) continue;
      const double fct = A[r][c] / A[c][c];
      for (int b = c; b < 6; ++b) A[r][b] -= fct * A[c][b];
    }
  }
  double coef[5];
  for (int a = 0; a < 5; ++a) coef[a] = A[a][5] / A[a][a];
  for (std::size_t i = 0; i < nn; ++i) {
    const Vec3 v = g.node(i);
    q[i] -= coef[0] + coef[1] * v.x + coef[2] * v.y + coef[3] * v.z + coef[4] * norm2(v);
  }
}

DistField q_intra(const VelocityGrid& g, const DistField& f, const DistField& h,
                  const BoltzKernel& k, const BoltzOpts& o) {
  if (f.size() != g.size() || h.size() != g.size())
    throw invalid_parameter("q_intra: grid-mismatch");
  const SphereRule rule = sphere_rule(o.sphere_order);
  const bool same = (&f == &h);
  const double delta2 = k.gamma < 0.0 ? boltz_delta(k, g) * boltz_delta(k, g) : 0.0;
  const double prune = o.prune_rel > 0.0 ? o.prune_rel * max_abs(f) * max_abs(h) : -1.0;
  const double sw = [&] {
    double s = 0.0;
    for (double x : rule.wgt) s += x;
    return s;
  }();  // 4 pi

  const FieldGather Ff(g, f, o.gather_f, false);
  const FieldGather Fh(g, h, same ? o.gather_f : o.gather_g, false);

  const std::size_t nn = g.size();
  DistField out(nn, 0.0);
  parallel_for(nn, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 v = g.node(i);
      const double fv = f[i], hv = h[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < nn; ++j) {
        const double fs = f[j], hs = h[j];
        const double loss = 0.5 * (fv * hs + hv * fs);
        if (prune >= 0.0 && std::abs(fv * hs) + std::abs(hv * fs) <= prune) continue;
        const Vec3 vs = g.node(j);
        const Vec3 mid = 0.5 * (v + vs);
        const double r2 = norm2(v - vs);
        const double r = std::sqrt(r2);
        const double B = k.b0 * bmag(r2, k.gamma, delta2);
        double gain = 0.0;
        for (std::size_t s = 0; s < rule.size(); ++s) {
          const Vec3 d = (0.5 * r) * rule.dir[s];
          const Vec3 pp = mid + d;
          const Vec3 pm = mid - d;
          double gn;
          if (same) {
            gn = Ff.at(pp) * Ff.at(pm);
          } else {
            gn = 0.5 * (Ff.at(pp) * Fh.at(pm) + Fh.at(pp) * Ff.at(pm));
          }
          gain += rule.wgt[s] * gn;
        }
        acc += B * (gain - sw * loss);
      }
      out[i] = acc * g.cell_volume();
    }
  });
  if (o.conserve_project) project_collision_invariants(g, out);
  return out;
}

namespace {

// forward-weighted inter-species angular factor
inline double b_inter(double b0, double c) { return b0 * (1.0 + c); }

// literal appendix inter-species quadrature evaluated at several epsilons.
// heavy == true: output over v^H nodes, integrate over v^L (the HL form);
// heavy == false: output over v^L nodes, integrate over v^H (the LH form).
std::vector<DistField> inter_set(const VelocityGrid& g, const DistField& fL,
                                 const DistField& fH, const BoltzKernel& k,
                                 std::span<const double> eps, const BoltzOpts& o, bool heavy) {
  const SphereRule rule = sphere_rule(o.sphere_order);
  const double delta2 = k.gamma < 0.0 ? boltz_delta(k, g) * boltz_delta(k, g) : 0.0;
  const double prune = o.prune_rel > 0.0 ? o.prune_rel * max_abs(fL) * max_abs(fH) : -1.0;

  double abs_eps_max = 0.0;
  for (double e : eps) abs_eps_max = std::max(abs_eps_max, std::abs(e));
  const bool taylor = abs_eps_max <= o.taylor_eps_max;

  const GatherSpec& gl = heavy ? o.gather_g : o.gather_f;
  const GatherSpec& gh = heavy ? o.gather_f : o.gather_g;
  const FieldGather GL(g, fL, gl, false);
  const FieldGather GH(g, fH, gh, taylor);

  const std::size_t nn = g.size();
  const std::size_t ne = eps.size();
  std::vector<DistField> out(ne, DistField(nn, 0.0));

  parallel_for(nn, [&](std::size_t b, std::size_t e) {
    std::vector<double> acc(ne);
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 vi = g.node(i);  // v^H node (heavy) or v^L node (light)
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t j = 0; j < nn; ++j) {
        const Vec3 vj = g.node(j);
        const double fLv = heavy ? fL[j] : fL[i];
        const double fHv = heavy ? fH[i] : fH[j];
        if (prune >= 0.0 && std::abs(fLv * fHv) <= prune) continue;
        const double loss = fLv * fHv;
        const Vec3 vL = heavy ? vj : vi;
        const Vec3 vH = heavy ? vi : vj;
        const std::size_t iH = heavy ? i : j;
        const double rL = norm(vL);
        for (std::size_t s = 0; s < rule.size(); ++s) {
          const Vec3 sig = rule.dir[s];
          // anchor the light factor at the eps = 0 post-collision point so
          // that epsilon differences stay analytic in eps
          FieldGather::Anchor anc;
          if (taylor) anc = GL.anchor(rL * sig);
          for (std::size_t q = 0; q < ne; ++q) {
            const double ep = eps[q];
            const double op2 = 1.0 + ep * ep;
            const Vec3 wrel = vL - ep * vH;
            const double w2 = norm2(wrel);
            const double r = std::sqrt(w2);
            const double Bm = bmag(w2, k.gamma, delta2);
            const double c = r > 0.0 ? dot(wrel, sig) / r : 0.0;
            const Vec3 dsig = r * sig - wrel;
            const Vec3 pL = vL + (1.0 / op2) * dsig;
            const Vec3 dH = (-ep / op2) * dsig;
            const double lv = taylor ? GL.at_anchor(anc, pL) : GL.at(pL);
            const double hv = taylor ? GH.at_node_offset(iH, dH) : GH.at(vH + dH);
            acc[q] += rule.wgt[s] * Bm * b_inter(1.0, c) * (lv * hv - loss);
          }
        }
      }
      for (std::size_t q = 0; q < ne; ++q) out[q][i] = acc[q] * k.b0 * g.cell_volume();
    }
  });
  return out;
}

}  // namespace

std::vector<DistField> q_inter_lh_set(const VelocityGrid& g, const DistField& fL,
                                      const DistField& fH, const BoltzKernel& k,
                                      std::span<const double> eps, const BoltzOpts& o) {
  return inter_set(g, fL, fH, k, eps, o, false);
}

std::vector<DistField> q_inter_hl_set(const VelocityGrid& g, const DistField& fH,
                                      const DistField& fL, const BoltzKernel& k,
                                      std::span<const double> eps, const BoltzOpts& o) {
  // first gather spec belongs to fH here
  BoltzOpts oh = o;
  return inter_set(g, fL, fH, k, std::span<const double>(eps), oh, true);
}

DistField q_inter_lh_eps(const VelocityGrid& g, const DistField& fL, const DistField& fH,
                         double eps, const BoltzKernel& k, const BoltzOpts& o) {
  if (!(eps > 0.0)) throw invalid_parameter("q_inter_lh_eps: eps must be positive");
  const double e[1] = {eps};
  return q_inter_lh_set(g, fL, fH, k, e, o)[0];
}

DistField q_inter_hl_eps(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                         double eps, const BoltzKernel& k, const BoltzOpts& o) {
  if (!(eps > 0.0)) throw invalid_parameter("q_inter_hl_eps: eps must be positive");
  const double e[1] = {eps};
  DistField out = q_inter_hl_set(g, fH, fL, k, e, o)[0];
  const double inv = 1.0 / eps;
  for (double& x : out) x *= inv;
  return out;
}

DistField q0_lh(const VelocityGrid& g, const DistField& fL, double nH, const BoltzKernel& k,
                const BoltzOpts& o) {
  if (nH < 0.0) throw invalid_parameter("q0_lh: nH must be nonnegative");
  const SphereRule rule = sphere_rule(o.sphere_order);
  const double delta2 = k.gamma < 0.0 ? boltz_delta(k, g) * boltz_delta(k, g) : 0.0;
  const FieldGather GL(g, fL, o.gather_f, false);
  const std::size_t nn = g.size();
  DistField out(nn, 0.0);
  if (nH == 0.0) return out;
  parallel_for(nn, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3 v = g.node(i);
      const double r2 = norm2(v);
      const double r = std::sqrt(r2);
      const double Bm = bmag(r2, k.gamma, delta2);
      double acc = 0.0;
      for (std::size_t s = 0; s < rule.size(); ++s) {
        const Vec3 sig = rule.dir[s];
        const double c = r > 0.0 ? dot(v, sig) / r : 0.0;
        // anchored value, bit-identical to the eps = 0 entry of q_inter_lh_set
        const Vec3 p = r * sig;
        acc += rule.wgt[s] * Bm * b_inter(1.0, c) * (GL.at_anchor(GL.anchor(p), p) - fL[i]);
      }
      out[i] = nH * k.b0 * acc;
    }
  });
  return out;
}

DistField q0_hl(const VelocityGrid& g, const DistField& fH, const DistField& fL,
                const BoltzKernel& k, const BoltzOpts& o) {
  const SphereRule rule = sphere_rule(o.sphere_order);
  const double delta2 = k.gamma < 0.0 ? boltz_delta(k, g) * boltz_delta(k, g) : 0.0;
  // drift vector D = sum_v w fL(v) v S(v), S(v) = 0.5 sum_k wk B(v,sk)(1 - vhat.sk)
  Vec3 D;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 v = g.node(i);
    const double r2 = norm2(v);
    const double r = std::sqrt(r2);
    const double Bm = bmag(r2, k.gamma, delta2) * k.b0;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double c = r > 0.0 ? dot(v, rule.dir[q]) / r : 0.0;
      s += rule.wgt[q] * Bm * b_inter(1.0, c) * (1.0 - c);
    }
    D += (0.5 * s * fL[i]) * v;
  }
  D = D * g.cell_volume();
  const std::vector<Vec3> gh = gradient_central(g, fH);
  DistField out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -2.0 * dot(gh[i], D);
  return out;
}

}  // namespace dmx
