#pragma once

#include <vector>

#include "dmx/boltzmann.hpp"
#include "dmx/fpl.hpp"
#include "dmx/grid.hpp"

namespace dmx {

struct MacroState {
  double n_L = 1.0;
  double T_L = 1.0;
  double n_H = 1.0;
  Vec3 u_H;
  double T_H = 1.0;
  double t = 0.0;
};

// temperature-exchange coefficient by quadrature on the shared grid + rule.
// Boltzmann: (1/3) int int B(w, sigma) (1 - what.sigma) |w|^2 M_{0,T}(w) dsigma dw
// with the inter-species kernel; closed form (4 pi / 3) b0 T at gamma = 0.
// FPL: (2/3) int B(w) M_{0,T}(w) dw; closed form T at gamma = 0.
double lambda_of_T(const VelocityGrid& g, int sphere_order, double T, CollisionModel model,
                   const BoltzKernel& bk, const FPLKernel& fk);

struct RelaxOpts {
  double fixed_point_tol = 1e-12;
  int max_iter = 200;
  double damping = 1.0;
  int sphere_order = 4;
};

// one backward-Euler step of the temperature relaxation system with the
// lambda(T_L^{n+1}) coefficient, solved by damped fixed point. n's and
// n_H u_H are untouched; n_L T_L + n_H T_H is conserved algebraically.
MacroState relax_step_implicit(const MacroState& m, double dt, const VelocityGrid& g,
                               CollisionModel model, const BoltzKernel& bk, const FPLKernel& fk,
                               const RelaxOpts& o = {});

std::vector<MacroState> solve_relaxation(const MacroState& m0, double dt, double t_end,
                                         const VelocityGrid& g, CollisionModel model,
                                         const BoltzKernel& bk, const FPLKernel& fk,
                                         const RelaxOpts& o = {});

struct RK4Opts {
  double stability_c = 0.1;  // requires dt <= c * eps^2
  BoltzOpts boltz{};
  FPLOpts fpl{};
  bool weighted_interp = false;
};

// classical RK4 on the un-split stiff system
//   d/dt fL = (1/eps^2) [Q^{LL}(fL,fL) + Q^{LH}_eps(fL,fH)]
//   d/dt fH = (1/eps)   [Q^{HH}(fH,fH) + Q^{HL}_eps(fH,fL)]
// (no splitting, no penalties); reference for eps = O(1) cross checks.
void reference_rk4_step(const VelocityGrid& g, DistField& fL, DistField& fH, double eps,
                        double dt, CollisionModel model, const BoltzKernel& intra_L,
                        const BoltzKernel& intra_H, const BoltzKernel& inter,
                        const FPLKernel& fintra_L, const FPLKernel& fintra_H,
                        const FPLKernel& finter, const RK4Opts& o);

}  // namespace dmx
