#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cokrig/compat.hpp"
#include "cokrig/errors.hpp"

using namespace cokrig;

namespace {

const BivMatern kTheta0{1.2, 1.1, 0.2, 1.5, 0.05, 0.09, 0.07};
const BivGW kLambda1Published{1.2, 1.1, 0.2, 5.0, 1.0, 0.297, 0.535, 0.416};

bool has_violation(const CompatReport& r, const std::string& name) {
  return std::find(r.violations.begin(), r.violations.end(), name) != r.violations.end();
}

}  // namespace

TEST_CASE("c_kappa_mu") {
  for (double mu : {0.5, 3.0, 7.25}) CHECK(c_kappa_mu(0.0, mu) == doctest::Approx(mu).epsilon(1e-14));
  CHECK(c_kappa_mu(1.0, 5.0) == doctest::Approx(210.0).epsilon(1e-13));
  CHECK(std::cbrt(210.0) * 0.05 == doctest::Approx(0.2972).epsilon(1e-4));
  for (double mu : {1.0, 4.0, 9.0}) {
    double prev = 0.0;
    for (double kappa = 0.0; kappa <= 5.0; kappa += 0.1) {
      const double c = c_kappa_mu(kappa, mu);
      CHECK(c > prev);
      prev = c;
    }
  }
  try {
    c_kappa_mu(200.0, 5.0);
    FAIL("expected an overflow");
  } catch (const OverflowError& e) {
    CHECK(e.log_value() > 709.0);
  }
  CHECK_THROWS_AS(c_kappa_mu(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(c_kappa_mu(-1.0, 1.0), DomainError);
}

TEST_CASE("Matern/Matern conditions") {
  const CompatReport same = matern_matern_compatible(kTheta0, kTheta0, 2, 0.0);
  CHECK(same.compatible);
  for (double r : same.residuals) CHECK(r == 0.0);

  const BivMatern a{1.0, 1.0, 0.3, 0.5, 0.1, 0.1, 0.1};
  const BivMatern b{std::sqrt(2.0), std::sqrt(2.0), 0.3, 0.5, 0.2, 0.2, 0.2};
  CHECK(matern_matern_compatible(a, b, 2, 1e-12).compatible);
  CHECK(matern_matern_compatible(b, a, 2, 1e-12).compatible);

  BivMatern c = kTheta0;
  c.nu += 0.1;
  const CompatReport r = matern_matern_compatible(kTheta0, c, 2, 1e-9);
  CHECK_FALSE(r.compatible);
  CHECK(has_violation(r, "nu mismatch"));

  // Scaling all ranges by s and all sigmas by s^nu keeps the verdict.
  for (double s : {0.5, 2.0}) {
    BivMatern sa = a, sb = b;
    for (BivMatern* m : {&sa, &sb}) {
      m->alpha11 *= s;
      m->alpha22 *= s;
      m->alpha12 *= s;
      m->sigma11 *= std::pow(s, m->nu);
      m->sigma22 *= std::pow(s, m->nu);
    }
    CHECK(matern_matern_compatible(sa, sb, 2, 1e-12).compatible);
    CHECK(matern_matern_compatible(sa, b, 2, 1e-12).compatible);
    BivMatern sc = c;
    sc.alpha11 *= s;
    sc.sigma11 *= std::pow(s, sc.nu);
    CHECK_FALSE(matern_matern_compatible(kTheta0, sc, 2, 1e-9).compatible);
  }

  // Transitivity on a constructed triple.
  BivMatern t = b;
  t.sigma11 = std::sqrt(3.0);
  t.alpha11 = 0.3;
  t.alpha12 = std::sqrt(6.0) / 10.0;
  CHECK(matern_matern_compatible(b, t, 2, 1e-12).compatible);
  CHECK(matern_matern_compatible(a, t, 2, 1e-12).compatible);
  CHECK_THROWS_AS(matern_matern_compatible(a, b, 2, -1.0), DomainError);
}

TEST_CASE("Wendland/Wendland conditions") {
  CHECK(gw_gw_compatible(kLambda1Published, kLambda1Published, 2, 0.0).compatible);
  BivGW scaled = kLambda1Published;
  scaled.beta11 *= 2.0;
  scaled.beta22 *= 2.0;
  scaled.beta12 *= 2.0;
  scaled.sigma11 *= std::pow(2.0, 1.5);
  scaled.sigma22 *= std::pow(2.0, 1.5);
  CHECK(gw_gw_compatible(kLambda1Published, scaled, 2, 1e-12).compatible);
  CHECK(gw_gw_compatible(scaled, kLambda1Published, 2, 1e-12).compatible);

  BivGW edge = kLambda1Published;
  edge.mu = 2.0 + 0.5 + 1.0;
  const CompatReport r = gw_gw_compatible(edge, edge, 2, 1e-9);
  CHECK_FALSE(r.compatible);
  CHECK(has_violation(r, "mu too small"));
  BivGW other = kLambda1Published;
  other.kappa = 2.0;
  CHECK(has_violation(gw_gw_compatible(kLambda1Published, other, 2, 1e-9), "kappa mismatch"));
  other = kLambda1Published;
  other.mu = 6.0;
  CHECK(has_violation(gw_gw_compatible(kLambda1Published, other, 2, 1e-9), "mu mismatch"));
}

TEST_CASE("Matern/Wendland conditions") {
  const CompatReport pub = matern_gw_compatible(kTheta0, kLambda1Published, 2, 5e-3);
  CHECK(pub.compatible);
  CHECK(pub.violations.empty());
  CHECK_FALSE(matern_gw_compatible(kTheta0, kLambda1Published, 2, 1e-9).compatible);

  // kappa = 0, nu = 1/2: sigma sigma rho / alpha = mu sigma sigma rho / beta.
  const BivMatern m{1.0, 1.0, 0.5, 0.5, 0.1, 0.2, 0.15};
  const double mu = 4.0;
  const BivGW g{1.0, 1.0, 0.5, mu, 0.0, mu * 0.1, mu * 0.2, mu * 0.15};
  CHECK(matern_gw_compatible(m, g, 2, 1e-12).compatible);
  CHECK(compatible(BivModel{g}, BivModel{m}, 2, 1e-12).compatible);

  BivGW perturbed = kLambda1Published;
  const BivGW exact = derive_gw(kTheta0, 1.0, 5.0, 1.2, 1.1, 0.2, 2);
  perturbed = exact;
  perturbed.beta12 *= 1.1;
  const CompatReport r = matern_gw_compatible(kTheta0, perturbed, 2, 1e-9);
  CHECK_FALSE(r.compatible);
  CHECK(r.residual(1, 2) == doctest::Approx(0.331).epsilon(1e-9));
  CHECK(r.residual(1, 1) < 1e-12);

  BivMatern wrong_nu = kTheta0;
  wrong_nu.nu = 2.5;
  CHECK(has_violation(matern_gw_compatible(wrong_nu, exact, 2, 1e-9), "nu != kappa + 1/2"));
  BivGW low_mu = exact;
  low_mu.mu = 3.5;
  CHECK(has_violation(matern_gw_compatible(kTheta0, low_mu, 2, 1e-9), "mu too small"));
  BivMatern rough{1.0, 1.0, 0.2, 0.25, 0.1, 0.1, 0.1};
  BivGW askey_like{1.0, 1.0, 0.2, 5.0, 0.0, 1.0, 1.0, 1.0};
  CHECK(has_violation(matern_gw_compatible(rough, askey_like, 2, 1e-9), "nu < 1/2"));
}

TEST_CASE("range solver") {
  const GwRanges b = gw_ranges_from_matern(kTheta0, 1.0, 5.0, 1.2, 1.1, 0.2, 2);
  CHECK(std::round(b.beta11 * 1000.0) / 1000.0 == doctest::Approx(0.297));
  CHECK(std::round(b.beta22 * 1000.0) / 1000.0 == doctest::Approx(0.535));
  CHECK(std::round(b.beta12 * 1000.0) / 1000.0 == doctest::Approx(0.416));
  // Same variances and correlation: beta = C^{1/(1+2k)} alpha^{2nu/(1+2k)}.
  CHECK(b.beta11 == doctest::Approx(std::cbrt(210.0) * 0.05).epsilon(1e-13));
  CHECK(b.beta12 == doctest::Approx(std::cbrt(210.0) * 0.07).epsilon(1e-13));

  for (double delta : {-0.6, -0.2, 0.0, 0.2, 0.6}) {
    const BivGW la = derive_gw(kTheta0, 1.0, 5.0, 1.2 + delta, 1.1 - delta, 0.2, 2);
    CHECK(matern_gw_compatible(kTheta0, la, 2, 1e-10).compatible);
  }
  CHECK_THROWS_AS(gw_ranges_from_matern(kTheta0, 0.5, 5.0, 1.2, 1.1, 0.2, 2), DomainError);
  CHECK_THROWS_AS(gw_ranges_from_matern(kTheta0, 1.0, 3.5, 1.2, 1.1, 0.2, 2), DomainError);
  CHECK_THROWS_AS(gw_ranges_from_matern(kTheta0, 1.0, 5.0, 1.2, 1.1, -0.2, 2), DomainError);
}

TEST_CASE("random round trips") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + static_cast<int>(u(rng) * 3.0) % 3;
    const double kappa = std::floor(u(rng) * 4.0) * 0.5;
    BivMatern th{0.2 + 2.0 * u(rng), 0.2 + 2.0 * u(rng), -0.9 + 1.8 * u(rng), kappa + 0.5,
                 0.01 + u(rng), 0.01 + u(rng), 0.01 + u(rng)};
    if (th.rho12 == 0.0) th.rho12 = 0.1;
    const double mu = d + 0.5 + kappa + 0.01 + 5.0 * u(rng);
    const double rho1 = th.rho12 > 0 ? 0.05 + 0.9 * u(rng) : -0.05 - 0.9 * u(rng);
    const BivGW la = derive_gw(th, kappa, mu, 0.2 + 2.0 * u(rng), 0.2 + 2.0 * u(rng), rho1, d);
    const CompatReport r = matern_gw_compatible(th, la, d, 1e-10);
    CHECK(r.compatible);
    CHECK(compatible(BivModel{la}, BivModel{th}, d, 1e-10).compatible);
  }
}

TEST_CASE("tail diagnostic") {
  const BivModel m0{kTheta0};
  const TailDiagnostic same = theorem2_tail_diagnostic(m0, m0, 2);
  CHECK(same.verdict == TailVerdict::identical);

  const BivModel exact{derive_gw(kTheta0, 1.0, 5.0, 1.2, 1.1, 0.2, 2)};
  const TailDiagnostic good = theorem2_tail_diagnostic(m0, exact, 2);
  CHECK(good.verdict == TailVerdict::integrable);
  CHECK(good.slope < -2.1);

  BivMatern off = kTheta0;
  off.alpha11 = 0.06;
  const TailDiagnostic bad = theorem2_tail_diagnostic(m0, BivModel{off}, 2);
  CHECK(bad.verdict == TailVerdict::not_integrable);
  CHECK(std::abs(bad.slope) < 0.1);
  CHECK(std::string(to_string(TailVerdict::not_integrable)) == "not integrable");
  CHECK_THROWS_AS(theorem2_tail_diagnostic(m0, exact, 2, 10.0, 500.0), DomainError);
}
