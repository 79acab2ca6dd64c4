#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmx {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

// one distribution function sampled on the velocity grid nodes
using DistField = std::vector<double>;

// raw moments: P0 = int f, P1 = int v f, P2 = int |v|^2/2 f
struct MomentVector {
  double p0 = 0.0;
  Vec3 p1;
  double p2 = 0.0;
};

// macroscopic (n, u, T)
struct Moments {
  double n = 0.0;
  Vec3 u;
  double T = 0.0;
};

struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct mismatched_series : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dmx
