#pragma once

#include <cstddef>
#include <functional>

#include "dmx/types.hpp"

namespace dmx {

// Uniform Cartesian velocity lattice on [-vmax, vmax]^3, midpoint nodes.
// N is even so that no node sits at v = 0 and the node set is symmetric
// under v -> -v; odd moments of even fields then vanish exactly.
class VelocityGrid {
 public:
  VelocityGrid(double vmax, int n);

  double vmax() const { return vmax_; }
  int n() const { return n_; }
  double dv() const { return dv_; }
  double cell_volume() const { return w_; }  // midpoint quadrature weight
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  double axis(int i) const { return axis_[static_cast<std::size_t>(i)]; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  Vec3 node(std::size_t idx) const {
    const int k = static_cast<int>(idx % n_);
    const int j = static_cast<int>((idx / n_) % n_);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {axis_[i], axis_[j], axis_[k]};
  }

  DistField zero_field() const { return DistField(size(), 0.0); }

 private:
  double vmax_;
  int n_;
  double dv_;
  double w_;
  std::vector<double> axis_;
};

inline VelocityGrid build_grid(double vmax, int n) { return VelocityGrid(vmax, n); }

// Product quadrature on S^2: Gauss-Legendre in cos(theta), uniform azimuth.
// Antipodally symmetric; weights sum to 4*pi.
struct SphereRule {
  std::vector<Vec3> dir;
  std::vector<double> wgt;
  std::size_t size() const { return dir.size(); }
};

SphereRule sphere_rule(int order);

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

double integrate(const VelocityGrid& g, const DistField& f);
double integrate(const VelocityGrid& g, const DistField& f,
                 const std::function<double(const Vec3&)>& weight);

// trilinear interpolation of nodal data; returns 0 outside [-vmax, vmax]^3
double interpolate(const VelocityGrid& g, const DistField& f, const Vec3& p);

DistField maxwellian(const VelocityGrid& g, double n, const Vec3& u, double T);
double maxwellian_at(const Vec3& p, double n, const Vec3& u, double T);

MomentVector compute_moments(const VelocityGrid& g, const DistField& f);
Moments macro_from_moments(const MomentVector& m);  // throws on p0 <= 0
Moments compute_macro(const VelocityGrid& g, const DistField& f);

}  // namespace dmx
