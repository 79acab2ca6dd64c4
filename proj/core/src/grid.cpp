#include "dmx/grid.hpp"

#include <algorithm>
#include <cmath>

namespace dmx {

VelocityGrid::VelocityGrid(double vmax, int n) : vmax_(vmax), n_(n) {
  if (n < 4 || n % 2 != 0) throw invalid_parameter("grid: N must be even and >= 4");
  if (!(vmax > 0.0)) throw invalid_parameter("grid: V_max must be positive");
  dv_ = 2.0 * vmax / n;
  w_ = dv_ * dv_ * dv_;
  axis_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) axis_[static_cast<std::size_t>(i)] = -vmax + (i + 0.5) * dv_;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on P_n
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -t;
    x[static_cast<std::size_t>(n - 1 - i)] = t;
    const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

SphereRule sphere_rule(int order) {
  if (order < 2) throw invalid_parameter("sphere_rule: order must be >= 2");
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  const int m = 2 * order;
  SphereRule r;
  r.dir.reserve(static_cast<std::size_t>(order) * m);
  r.wgt.reserve(static_cast<std::size_t>(order) * m);
  const double dphi = 2.0 * M_PI / m;
  for (int i = 0; i < order; ++i) {
    const double ct = x[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < m; ++j) {
      const double phi = (j + 0.5) * dphi;
      r.dir.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      r.wgt.push_back(w[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return r;
}

double integrate(const VelocityGrid& g, const DistField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_volume();
}

double integrate(const VelocityGrid& g, const DistField& f,
                 const std::function<double(const Vec3&)>& weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * weight(g.node(i));
  return s * g.cell_volume();
}

double interpolate(const VelocityGrid& g, const DistField& f, const Vec3& p) {
  const double V = g.vmax();
  if (std::abs(p.x) > V || std::abs(p.y) > V || std::abs(p.z) > V) return 0.0;
  const int n = g.n();
  const double inv = 1.0 / g.dv();
  int idx[3];
  double th[3];
  for (int d = 0; d < 3; ++d) {
    const double t = (p[d] - g.axis(0)) * inv;
    const double fl = std::floor(t);
    idx[d] = static_cast<int>(fl);
    th[d] = t - fl;
  }
  double out = 0.0;
  for (int dx = 0; dx < 2; ++dx) {
    const int i = idx[0] + dx;
    if (i < 0 || i >= n) continue;
    const double wx = dx ? th[0] : 1.0 - th[0];
    for (int dy = 0; dy < 2; ++dy) {
      const int j = idx[1] + dy;
      if (j < 0 || j >= n) continue;
      const double wy = dy ? th[1] : 1.0 - th[1];
      for (int dz = 0; dz < 2; ++dz) {
        const int k = idx[2] + dz;
        if (k < 0 || k >= n) continue;
        const double wz = dz ? th[2] : 1.0 - th[2];
        out += wx * wy * wz * f[g.index(i, j, k)];
      }
    }
  }
  return out;
}

double maxwellian_at(const Vec3& p, double n, const Vec3& u, double T) {
  const double d2 = norm2(p - u);
  return n / std::pow(2.0 * M_PI * T, 1.5) * std::exp(-d2 / (2.0 * T));
}

DistField maxwellian(const VelocityGrid& g, double n, const Vec3& u, double T) {
  if (!(T > 0.0)) throw invalid_parameter("maxwellian: T must be positive");
  if (n < 0.0) throw invalid_parameter("maxwellian: n must be nonnegative");
  DistField f(g.size());
  if (n == 0.0) return f;
  const double pref = n / std::pow(2.0 * M_PI * T, 1.5);
  const double a = -0.5 / T;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = pref * std::exp(a * norm2(g.node(i) - u));
  return f;
}

MomentVector compute_moments(const VelocityGrid& g, const DistField& f) {
  MomentVector m;
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

Moments macro_from_moments(const MomentVector& m) {
  if (!(m.p0 > 0.0)) throw solver_error("degenerate-density: P0 <= 0");
  Moments mm;
  mm.n = m.p0;
  mm.u = m.p1 * (1.0 / m.p0);
  // P2 = 1/2 P0 |u|^2 + 3/2 P0 T
  mm.T = (2.0 * m.p2 / m.p0 - norm2(mm.u)) / 3.0;
  return mm;
}

Moments compute_macro(const VelocityGrid& g, const DistField& f) {
  return macro_from_moments(compute_moments(g, f));
}

}  // namespace dmx
