#pragma once

#include <functional>
#include <optional>

#include "dmx/boltzmann.hpp"
#include "dmx/fpl.hpp"
#include "dmx/grid.hpp"

namespace dmx {

struct PenaltyConfig {
  double beta0 = 1.0;        // FP penalty safety factor, > 1/2
  double mu_margin = 1.1;    // linear-penalty rate = margin * strict bound
  double cg_tol = 1e-10;     // relative residual
  int cg_max_iter = 5000;
  double bgk_floor_rel = 1e-12;  // |f - M| floor relative to max |M|
  double default_beta = 1.0;     // fallback when no rate information exists
};

// beta = sup |Qf / (f - M)| over nodes where |f - M| is above the floor;
// falls back to the time-difference estimate when history is supplied, then
// to the configured default. Always positive.
double bgk_beta(const DistField& f, const DistField& M, const DistField& Qf,
                const PenaltyConfig& cfg, const DistField* f_prev = nullptr,
                const DistField* Qf_prev = nullptr);

// solves f - c (M_next - f) = rhs pointwise
DistField bgk_implicit_update(const DistField& rhs, const DistField& M_next, double c);

enum class MuMode { boltzmann_q0, boltzmann_loss, fpl };

// strict rate bounds (no margin applied):
//   boltzmann_q0:  max_v int_{S^2} B(v, sigma) dsigma for the inter kernel
//   boltzmann_loss: max_v Q^-(g)(v) = max_v int B(|v - v1|) dsigma g1 dv1
//   fpl:           0.5 max_v lambda_max( int B S g1 dv1 )
double linear_mu(const VelocityGrid& g, MuMode mode, const BoltzKernel& bk, const FPLKernel& fk,
                 const DistField* gfield);

// largest eigenvalue magnitude of a symmetric 3x3 matrix (closed form)
double sym3_spectral_radius(const double a[3][3]);

// symmetrized linear FP operator, appendix 1D stencil summed over axes:
// (P h)_j = (1/dv^2) (h_{j+1} - (sqrt(M_{j+1}) + sqrt(M_{j-1}))/sqrt(M_j) h_j + h_{j-1})
// with M = 0 ghosts. Symmetric negative-semidefinite at round-off.
DistField fp_ptilde_apply(const VelocityGrid& g, const DistField& h, const DistField& sqrtM);

// P_FP(f) = sqrt(M) * Ptilde(f / sqrt(M)); annihilates c*M exactly
DistField fp_penalty_apply(const VelocityGrid& g, const DistField& f, const DistField& M);

// conjugate gradient for SPD apply; returns iterations used, throws on stall
int conjugate_gradient(const std::function<DistField(const DistField&)>& apply,
                       const DistField& b, DistField& x, double tol, int max_iter);

// solves (I - c P_FP^{M_next}) f = rhs via CG on h = f / sqrt(M_next)
DistField fp_implicit_solve(const VelocityGrid& g, const DistField& rhs, const DistField& M_next,
                            double c, const PenaltyConfig& cfg);

}  // namespace dmx
