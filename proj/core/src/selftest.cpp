#include <cmath>
#include <cstdio>

#include "dmx/oracle.hpp"
#include "dmx/penalty.hpp"
#include "dmx/runner.hpp"
#include "dmx/scheme.hpp"
#include "dmx/spatial.hpp"

namespace dmx {

namespace {

int checks = 0, failures = 0;

void check(bool ok, const char* what) {
  ++checks;
  if (!ok) ++failures;
  std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what);
}

}  // namespace

// quick invariant sweep used by the `selftest` CLI verb
int selftest() {
  const VelocityGrid g(6.0, 8);
  const SphereRule rule = sphere_rule(4);

  double sw = 0.0;
  for (double w : rule.wgt) sw += w;
  check(std::abs(sw - 4.0 * M_PI) < 1e-12, "sphere rule weights sum to 4 pi");

  const DistField M = maxwellian(g, 1.0, Vec3{}, 1.0);
  const Moments mm = compute_macro(g, M);
  check(std::abs(mm.n - 1.0) < 1e-2 && std::abs(mm.T - 1.0) < 1e-2,
        "maxwellian moment round trip");

  const double vol = integrate(g, M, [](const Vec3& v) { return v.x; });
  check(std::abs(vol) < 1e-15, "odd moment of even field vanishes");

  const BoltzKernel bk{};
  const FPLKernel fk{0.0, 0.0};
  const double lam = lambda_of_T(g, 4, 1.0, CollisionModel::boltzmann, bk, fk);
  check(std::abs(lam - 4.0 * M_PI / 3.0) < 0.05, "lambda(1) near 4 pi / 3");

  MacroState ms{1.0, 1.0, 1.0, Vec3{}, 2.0, 0.0};
  const MacroState ms1 = relax_step_implicit(ms, 0.01, g, CollisionModel::boltzmann, bk, fk);
  check(std::abs((ms1.n_L * ms1.T_L + ms1.n_H * ms1.T_H) - (1.0 + 2.0)) < 1e-11,
        "oracle conserves n_L T_L + n_H T_H");
  check(ms1.T_H < 2.0 && ms1.T_L > 1.0, "oracle temperatures approach");

  const DistField sq = [&] {
    DistField s(M.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(M[i]);
    return s;
  }();
  DistField h1(g.size()), h2(g.size());
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto rnd = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state % 1000) / 500.0 - 1.0;
  };
  for (std::size_t i = 0; i < h1.size(); ++i) {
    h1[i] = rnd();
    h2[i] = rnd();
  }
  const DistField P1 = fp_ptilde_apply(g, h1, sq);
  const DistField P2 = fp_ptilde_apply(g, h2, sq);
  double s12 = 0, s21 = 0, s11 = 0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    s12 += P1[i] * h2[i];
    s21 += h1[i] * P2[i];
    s11 += P1[i] * h1[i];
  }
  check(std::abs(s12 - s21) < 1e-9 * (std::abs(s12) + 1.0), "FP penalty operator symmetric");
  check(s11 <= 1e-12, "FP penalty operator negative-semidefinite");

  auto [p1, p2] = psi_factors(2.0);
  check(p1 == 0.25 && p2 == 0.5, "psi factors at eps = 2");

  std::printf("selftest: %d checks, %d failures\n", checks, failures);
  const int rc = failures == 0 ? 0 : 2;
  checks = failures = 0;
  return rc;
}

}  // namespace dmx
