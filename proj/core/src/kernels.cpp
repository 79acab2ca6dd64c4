#include "dmx/kernels.hpp"

#include <cmath>

namespace dmx {

std::vector<Vec3> gradient_central(const VelocityGrid& g, const DistField& f) {
  const int n = g.n();
  const double inv2 = 1.0 / (2.0 * g.dv());
  const double inv1 = 1.0 / g.dv();
  std::vector<Vec3> out(f.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const std::size_t c = g.index(i, j, k);
        Vec3 gr;
        gr.x = (i == 0)       ? (f[g.index(1, j, k)] - f[c]) * inv1
               : (i == n - 1) ? (f[c] - f[g.index(n - 2, j, k)]) * inv1
                              : (f[g.index(i + 1, j, k)] - f[g.index(i - 1, j, k)]) * inv2;
        gr.y = (j == 0)       ? (f[g.index(i, 1, k)] - f[c]) * inv1
               : (j == n - 1) ? (f[c] - f[g.index(i, n - 2, k)]) * inv1
                              : (f[g.index(i, j + 1, k)] - f[g.index(i, j - 1, k)]) * inv2;
        gr.z = (k == 0)       ? (f[g.index(i, j, 1)] - f[c]) * inv1
               : (k == n - 1) ? (f[c] - f[g.index(i, j, n - 2)]) * inv1
                              : (f[g.index(i, j, k + 1)] - f[g.index(i, j, k - 1)]) * inv2;
        out[c] = gr;
      }
    }
  }
  return out;
}

FieldGather::FieldGather(const VelocityGrid& g, const DistField& f, const GatherSpec& spec,
                         bool need_taylor)
    : g_(&g), f_(&f), spec_(spec) {
  if (spec_.weighted) {
    mfloor_ = spec_.floor_rel * maxwellian_at(spec_.ref_u, spec_.ref_n, spec_.ref_u, spec_.ref_T);
    h_.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      h_[i] = f[i] / std::max(maxwellian_at(g.node(i), spec_.ref_n, spec_.ref_u, spec_.ref_T),
                              mfloor_);
    if (need_taylor) gh_ = gradient_central(g, h_);
  } else if (need_taylor) {
    gh_ = gradient_central(g, f);
  }
}

double FieldGather::clamped_trilinear(const DistField& a, const Vec3& p) const {
  const int n = g_->n();
  const double inv = 1.0 / g_->dv();
  int idx[3];
  double th[3];
  for (int d = 0; d < 3; ++d) {
    const double t = (p[d] - g_->axis(0)) * inv;
    double fl = std::floor(t);
    int i0 = static_cast<int>(fl);
    double w = t - fl;
    if (i0 < 0) { i0 = 0; w = 0.0; }
    if (i0 > n - 2) { i0 = n - 2; w = 1.0; }
    idx[d] = i0;
    th[d] = w;
  }
  double out = 0.0;
  for (int dx = 0; dx < 2; ++dx) {
    const double wx = dx ? th[0] : 1.0 - th[0];
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? th[1] : 1.0 - th[1];
      for (int dz = 0; dz < 2; ++dz) {
        const double wz = dz ? th[2] : 1.0 - th[2];
        out += wx * wy * wz * a[g_->index(idx[0] + dx, idx[1] + dy, idx[2] + dz)];
      }
    }
  }
  return out;
}

double FieldGather::at(const Vec3& p) const {
  if (!spec_.weighted) return interpolate(*g_, *f_, p);
  const double V = g_->vmax();
  if (std::abs(p.x) > V || std::abs(p.y) > V || std::abs(p.z) > V) return 0.0;
  return clamped_trilinear(h_, p) *
         std::max(maxwellian_at(p, spec_.ref_n, spec_.ref_u, spec_.ref_T), mfloor_);
}

double FieldGather::at_node_offset(std::size_t i, const Vec3& d) const {
  if (gh_.empty()) return at(g_->node(i) + d);
  if (!spec_.weighted) return (*f_)[i] + dot(d, gh_[i]);
  const Vec3 p = g_->node(i) + d;
  return (h_[i] + dot(d, gh_[i])) *
         std::max(maxwellian_at(p, spec_.ref_n, spec_.ref_u, spec_.ref_T), mfloor_);
}

FieldGather::Anchor FieldGather::anchor(const Vec3& p0) const {
  Anchor a;
  a.p0 = p0;
  const double V = g_->vmax();
  if (std::abs(p0.x) > V || std::abs(p0.y) > V || std::abs(p0.z) > V) return a;
  a.inside = true;
  const DistField& src = spec_.weighted ? h_ : *f_;
  const int n = g_->n();
  const double inv = 1.0 / g_->dv();
  int idx[3];
  double th[3];
  bool clamped[3];
  for (int d = 0; d < 3; ++d) {
    // cell selection canonicalized on |coordinate| so that mirror points get
    // mirror cells bit-exactly even when p0 sits on a cell face (grid-aligned
    // sphere directions produce many such points)
    const bool neg = p0[d] < 0.0;
    const double t = (std::abs(p0[d]) - g_->axis(0)) * inv;
    const double fl = std::floor(t);
    int i0 = static_cast<int>(fl);
    double w = t - fl;
    clamped[d] = false;
    if (i0 > n - 2) { i0 = n - 2; w = 1.0; clamped[d] = true; }
    if (neg) {
      i0 = n - 2 - i0;
      w = 1.0 - w;
    }
    idx[d] = i0;
    th[d] = w;
  }
  double corner[2][2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) {
        double c = src[g_->index(idx[0] + dx, idx[1] + dy, idx[2] + dz)];
        if (!spec_.weighted) {
          // zero-padding convention of the plain interpolant at the hull
          // boundary is already inside the field values, nothing to do
        }
        corner[dx][dy][dz] = c;
      }
  const double wx1 = th[0], wx0 = 1.0 - wx1;
  const double wy1 = th[1], wy0 = 1.0 - wy1;
  const double wz1 = th[2], wz0 = 1.0 - wz1;
  a.v = wx0 * (wy0 * (wz0 * corner[0][0][0] + wz1 * corner[0][0][1]) +
               wy1 * (wz0 * corner[0][1][0] + wz1 * corner[0][1][1])) +
        wx1 * (wy0 * (wz0 * corner[1][0][0] + wz1 * corner[1][0][1]) +
               wy1 * (wz0 * corner[1][1][0] + wz1 * corner[1][1][1]));
  // in-cell gradient of the trilinear interpolant (zero along clamped axes)
  a.grad.x = clamped[0] ? 0.0
                        : inv * (wy0 * (wz0 * (corner[1][0][0] - corner[0][0][0]) +
                                        wz1 * (corner[1][0][1] - corner[0][0][1])) +
                                 wy1 * (wz0 * (corner[1][1][0] - corner[0][1][0]) +
                                        wz1 * (corner[1][1][1] - corner[0][1][1])));
  a.grad.y = clamped[1] ? 0.0
                        : inv * (wx0 * (wz0 * (corner[0][1][0] - corner[0][0][0]) +
                                        wz1 * (corner[0][1][1] - corner[0][0][1])) +
                                 wx1 * (wz0 * (corner[1][1][0] - corner[1][0][0]) +
                                        wz1 * (corner[1][1][1] - corner[1][0][1])));
  a.grad.z = clamped[2] ? 0.0
                        : inv * (wx0 * (wy0 * (corner[0][0][1] - corner[0][0][0]) +
                                        wy1 * (corner[0][1][1] - corner[0][1][0])) +
                                 wx1 * (wy0 * (corner[1][0][1] - corner[1][0][0]) +
                                        wy1 * (corner[1][1][1] - corner[1][1][0])));
  return a;
}

double FieldGather::at_anchor(const Anchor& a, const Vec3& p) const {
  if (!a.inside) return 0.0;
  const double base = a.v + dot(p - a.p0, a.grad);
  if (!spec_.weighted) return base;
  return base * std::max(maxwellian_at(p, spec_.ref_n, spec_.ref_u, spec_.ref_T), mfloor_);
}

}  // namespace dmx
