#include "dmx/spatial.hpp"

#include <cmath>

namespace dmx {

std::pair<double, double> psi_factors(double eps) {
  if (!(eps > 0.0)) throw invalid_parameter("psi_factors: eps must be positive");
  return {std::min(1.0, 1.0 / (eps * eps)), std::min(1.0, 1.0 / eps)};
}

namespace {

// upwind x-derivative of field component at cell ix for a velocity node with
// x-velocity vx (periodic wrap)
inline double ddx_upwind(const std::vector<SplitState>& cells, int ix, int nx, double dx,
                         double vx, const DistField SplitState::* member, std::size_t node) {
  const int im = (ix + nx - 1) % nx;
  const int ip = (ix + 1) % nx;
  const double fc = (cells[static_cast<std::size_t>(ix)].*member)[node];
  if (vx > 0.0) return (fc - (cells[static_cast<std::size_t>(im)].*member)[node]) / dx;
  return ((cells[static_cast<std::size_t>(ip)].*member)[node] - fc) / dx;
}

// upwind force-advection F . grad_v f with zero inflow at the v-boundary
double force_advect(const VelocityGrid& g, const DistField& f, const Vec3& F, int i, int j,
                    int k) {
  if (F.x == 0.0 && F.y == 0.0 && F.z == 0.0) return 0.0;
  const int n = g.n();
  const double idv = 1.0 / g.dv();
  auto at = [&](int a, int b, int c) -> double {
    if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n) return 0.0;
    return f[g.index(a, b, c)];
  };
  double s = 0.0;
  const double fc = at(i, j, k);
  s += F.x * (F.x > 0.0 ? (fc - at(i - 1, j, k)) : (at(i + 1, j, k) - fc)) * idv;
  s += F.y * (F.y > 0.0 ? (fc - at(i, j - 1, k)) : (at(i, j + 1, k) - fc)) * idv;
  s += F.z * (F.z > 0.0 ? (fc - at(i, j, k - 1)) : (at(i, j, k + 1) - fc)) * idv;
  return s;
}

}  // namespace

FieldArray collision_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                          const SchemeConfig& c) {
  FieldArray out = fa;
  const double eps = fa.cells.empty() ? 1.0 : fa.cells.front().eps;
  const auto [psi1, psi2] = psi_factors(eps);
  const double c1 = 1.0 - eps * eps * psi1;  // exactly 0 for eps <= 1
  const double c2 = 1.0 - eps * psi2;
  for (int ix = 0; ix < mesh.nx; ++ix) {
    const SplitState& s = fa.cells[static_cast<std::size_t>(ix)];
    SplitState ns = ap_step(g, s, c);
    if (c1 != 0.0 || c2 != 0.0) {
      // non-stiff regime corrections, pre-step gradients, first order
      const double a2 = c.dt / (eps * eps);
      const double a1 = c.dt / eps;
      const int n = g.n();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const std::size_t node = g.index(i, j, k);
            const double vx = g.axis(i);
            const double tL = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                              &SplitState::fL0, node) +
                              force_advect(g, s.fL0, fa.FL, i, j, k);
            const double tH = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                              &SplitState::fH0, node) +
                              force_advect(g, s.fH0, fa.FH, i, j, k);
            ns.fL1[node] -= a2 * c1 * tL;
            ns.fH1[node] -= a1 * c2 * tH;
          }
        }
      }
    }
    out.cells[static_cast<std::size_t>(ix)] = std::move(ns);
  }
  return out;
}

FieldArray transport_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                          double dt, double cfl) {
  const double eps = fa.cells.empty() ? 1.0 : fa.cells.front().eps;
  const auto [psi1, psi2] = psi_factors(eps);
  const double fmax = std::max({std::abs(fa.FL.x), std::abs(fa.FL.y), std::abs(fa.FL.z),
                                std::abs(fa.FH.x), std::abs(fa.FH.y), std::abs(fa.FH.z)});
  if (dt > cfl * mesh.dx / g.vmax())
    throw solver_error("transport_step: cfl-violation (x advection)");
  if (fmax > 0.0 && dt > cfl * g.dv() / fmax)
    throw solver_error("transport_step: cfl-violation (v advection)");

  FieldArray out = fa;
  const int n = g.n();
  for (int ix = 0; ix < mesh.nx; ++ix) {
    SplitState& ns = out.cells[static_cast<std::size_t>(ix)];
    const SplitState& s = fa.cells[static_cast<std::size_t>(ix)];
    for (int i = 0; i < n; ++i) {
      const double vx = g.axis(i);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const std::size_t node = g.index(i, j, k);
          const double dL1 = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                             &SplitState::fL1, node) +
                             force_advect(g, s.fL1, fa.FL, i, j, k);
          const double dL0 = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                             &SplitState::fL0, node) +
                             force_advect(g, s.fL0, fa.FL, i, j, k);
          const double dH1 = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                             &SplitState::fH1, node) +
                             force_advect(g, s.fH1, fa.FH, i, j, k);
          const double dH0 = vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx,
                                             &SplitState::fH0, node) +
                             force_advect(g, s.fH0, fa.FH, i, j, k);
          ns.fL0[node] = s.fL0[node] - dt * dL1;
          ns.fL1[node] = s.fL1[node] - dt * psi1 * dL0;
          ns.fH0[node] = s.fH0[node] - dt * eps * dH1;
          ns.fH1[node] = s.fH1[node] - dt * psi2 * dH0;
        }
      }
    }
    ns.t = s.t;  // collision step advanced time already when used via full_step
  }
  return out;
}

FieldArray full_step(const VelocityGrid& g, const SpatialMesh& mesh, const FieldArray& fa,
                     const SchemeConfig& c, double cfl) {
  // pre-step f1 transport moments for the inhomogeneous moment updates
  const double eps = fa.cells.empty() ? 1.0 : fa.cells.front().eps;
  const int n = g.n();
  const std::size_t ncell = fa.cells.size();
  std::vector<MomentVector> trL(ncell), trH(ncell);
  for (int ix = 0; ix < static_cast<int>(ncell); ++ix) {
    const SplitState& s = fa.cells[static_cast<std::size_t>(ix)];
    MomentVector tL, tH;
    for (int i = 0; i < n; ++i) {
      const double vx = g.axis(i);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const std::size_t node = g.index(i, j, k);
          const Vec3 v = g.node(node);
          const double gL =
              vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx, &SplitState::fL1, node);
          const double gH =
              vx * ddx_upwind(fa.cells, ix, mesh.nx, mesh.dx, vx, &SplitState::fH1, node);
          tL.p0 += gL;
          tL.p1 += gL * v;
          tL.p2 += 0.5 * norm2(v) * gL;
          tH.p0 += gH;
          tH.p1 += gH * v;
          tH.p2 += 0.5 * norm2(v) * gH;
        }
      }
    }
    const double w = g.cell_volume();
    tL.p0 *= w;
    tL.p1 = tL.p1 * w;
    tL.p2 *= w;
    tH.p0 *= w;
    tH.p1 = tH.p1 * w;
    tH.p2 *= w;
    trL[static_cast<std::size_t>(ix)] = tL;
    trH[static_cast<std::size_t>(ix)] = tH;
  }

  FieldArray mid = collision_step(g, mesh, fa, c);
  FieldArray out = transport_step(g, mesh, mid, c.dt, cfl);

  // transport contributions to the tracked moment systems; the heavy side is
  // eps-weighted like its field equation
  for (std::size_t ix = 0; ix < ncell; ++ix) {
    SplitState& s = out.cells[ix];
    if (trL[ix].p0 != 0.0 || norm2(trL[ix].p1) != 0.0 || trL[ix].p2 != 0.0) {
      s.momL0.p0 -= c.dt * trL[ix].p0;
      s.momL0.p1 -= c.dt * trL[ix].p1;
      s.momL0.p2 -= c.dt * trL[ix].p2;
    }
    if (trH[ix].p0 != 0.0 || norm2(trH[ix].p1) != 0.0 || trH[ix].p2 != 0.0) {
      s.momH0.p0 -= c.dt * eps * trH[ix].p0;
      s.momH0.p1 -= c.dt * eps * trH[ix].p1;
      s.momH0.p2 -= c.dt * eps * trH[ix].p2;
    }
  }
  return out;
}

}  // namespace dmx
