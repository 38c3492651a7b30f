#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cokrig/errors.hpp"
#include "cokrig/specfun.hpp"

using namespace cokrig;
using namespace cokrig::specfun;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Term-by-term K_{m+1/2} closed form, written independently of the library.
double k_half_reference(int m, double x) {
  double sum = 0.0;
  double fact_ratio = 1.0;  // (m+k)! / (k! (m-k)!)
  for (int k = 0; k <= m; ++k) {
    if (k > 0) fact_ratio *= static_cast<double>((m + k) * (m - k + 1)) / k;
    sum += fact_ratio / std::pow(2.0 * x, k);
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

// Defining series of J_order(x) for small x.
double bessel_j_series(double order, double x) {
  double sum = 0.0;
  for (int k = 0; k < 40; ++k)
    sum += std::pow(-1.0, k) * std::pow(0.5 * x, 2 * k + order) /
           (std::tgamma(k + 1.0) * std::tgamma(k + order + 1.0));
  return sum;
}

}  // namespace

TEST_CASE("config invariants") {
  SpecFunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rel_tol = 1e-5;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.max_series_terms = 50;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("ln_gamma") {
  CHECK(ln_gamma(1.0) == doctest::Approx(0.0));
  CHECK(rel_err(ln_gamma(0.5), 0.5 * std::log(std::numbers::pi)) < 1e-13);
  CHECK(rel_err(ln_gamma(8.0), std::log(5040.0)) < 1e-13);
  // mpmath loggamma
  CHECK(rel_err(ln_gamma(0.001), 6.907178885383853682512) < 1e-13);
  CHECK(rel_err(ln_gamma(3.7), 1.428072326665387921872) < 1e-13);
  CHECK(rel_err(ln_gamma(150.5), 602.5139548705854119507) < 1e-13);
  CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
  CHECK_THROWS_AS(ln_gamma(-1.5), DomainError);
}

TEST_CASE("gamma recurrence on [0.5, 50]") {
  for (double x = 0.5; x <= 50.0; x += 0.37)
    CHECK(rel_err(std::exp(ln_gamma(x + 1.0)), x * std::exp(ln_gamma(x))) < 1e-12);
}

TEST_CASE("beta_fn") {
  CHECK(rel_err(beta_fn(1.0, 1.0), 1.0) < 1e-12);
  CHECK(rel_err(beta_fn(2.0, 6.0), 1.0 / 42.0) < 1e-12);
  CHECK(rel_err(beta_fn(0.5, 0.5), std::numbers::pi) < 1e-12);
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(beta_fn(1.0, -2.0), DomainError);
}

TEST_CASE("bessel_k closed forms and examples") {
  CHECK(rel_err(bessel_k(0.5, 1.0), std::sqrt(std::numbers::pi / 2.0) * std::exp(-1.0)) < 1e-12);
  CHECK(rel_err(bessel_k(1.5, 2.0), std::sqrt(std::numbers::pi / 4.0) * std::exp(-2.0) * 1.5) <
        1e-12);
  for (double x : {1e-6, 0.01, 0.3, 1.0, 7.0, 40.0, 300.0, 690.0})
    CHECK(rel_err(bessel_k(0.5, x) * std::sqrt(x) * std::exp(x), std::sqrt(std::numbers::pi / 2.0)) <
          1e-12);
}

TEST_CASE("bessel_k half-integer orders match the closed form") {
  for (int m = 0; m <= 5; ++m)
    for (double x = 0.1; x <= 50.0; x *= 1.3) {
      CHECK(rel_err(bessel_k(m + 0.5, x), k_half_reference(m, x)) < 1e-10);
      CHECK(rel_err(bessel_k_half_integer(m, x), k_half_reference(m, x)) < 1e-10);
    }
}

TEST_CASE("bessel_k general orders against mpmath") {
  CHECK(rel_err(bessel_k(0.3, 2.5), 0.06331387929629555952) < 1e-10);
  CHECK(rel_err(bessel_k(2.25, 0.01), 85213.79473934389943907) < 1e-10);
  CHECK(rel_err(bessel_k(7.5, 30.0), 5.340561476114257230514e-14) < 1e-10);
  CHECK(rel_err(bessel_k(0.0, 1e-8), 18.53661225961077840937) < 1e-10);
  const BesselKValue deep = bessel_k_checked(40.0, 600.0);
  CHECK_FALSE(deep.underflow);
  CHECK(rel_err(deep.value, 5.135340919831946771475e-262) < 1e-10);
}

TEST_CASE("bessel_k underflow and domain") {
  const BesselKValue v = bessel_k_checked(0.5, 800.0);
  CHECK(v.underflow);
  CHECK(v.value == 0.0);
  CHECK_THROWS_AS(bessel_k(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(-0.5, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_k(51.0, 1.0), DomainError);
}

TEST_CASE("bessel_j") {
  CHECK(bessel_j(0.0, 0.0) == doctest::Approx(1.0));
  for (double x : {0.1, 1.0, 3.7, 25.0, 400.0})
    CHECK(std::abs(bessel_j(-0.5, x) - std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x)) <
          1e-10);
  CHECK(std::abs(bessel_j(0.5, std::numbers::pi)) < 1e-10);
  CHECK(std::abs(bessel_j(0.5, 3.0) - 0.06500818287737577811) < 1e-10);
  CHECK(std::abs(bessel_j(0.0, 1000.5) - 0.01948655998713013737) < 1e-10);
  CHECK(std::abs(bessel_j(2.3, 7.1) - -0.3060338163244093054) < 1e-10);
  CHECK_THROWS_AS(bessel_j(-0.7, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_j(1.0, -1.0), DomainError);
}

TEST_CASE("bessel_j kernels match the defining series for x <= 1") {
  for (int d = 1; d <= 3; ++d) {
    const double order = 0.5 * d - 1.0;
    for (double x = 0.05; x <= 1.0; x += 0.05)
      CHECK(std::abs(bessel_j(order, x) - bessel_j_series(order, x)) < 1e-12);
  }
}

TEST_CASE("hyp1f2 series") {
  CHECK(hyp1f2(0.3, 1.7, 2.2, 0.0) == 1.0);
  // 1F2(a; a, 1; z) = 0F1(; 1; z): I0(2) and J0(2)
  CHECK(rel_err(hyp1f2(1.0, 1.0, 1.0, 1.0), 2.279585302336067267437) < 1e-12);
  CHECK(rel_err(hyp1f2(1.0, 1.0, 1.0, -1.0), 0.2238907791412356680518) < 1e-12);
  CHECK(rel_err(hyp1f2(0.7, 1.3, 2.1, 3.5), 2.373354343491859154233) < 1e-12);
  // d = 2, kappa = 1, mu = 5 at -(z beta)^2/4 = -25.
  CHECK(rel_err(hyp1f2(2.5, 5.0, 5.5, -25.0), 0.1097511199949044398749) < 1e-10);
}

TEST_CASE("hyp1f2 refusals") {
  CHECK_THROWS_AS(hyp1f2(2.5, 5.0, 5.5, -2600.0), CutoffError);
  CHECK_THROWS_AS(hyp1f2(2.5, 5.0, 5.5, -1000.0), PrecisionLossError);
  CHECK_THROWS_AS(hyp1f2(1.0, -2.0, 1.0, 0.5), DomainError);
  SpecFunConfig tight;
  tight.max_series_terms = 100;
  CHECK_THROWS_AS(hyp1f2(100.0, 1.0, 1.0, 2400.0, tight), ConvergenceError);
}

TEST_CASE("hyp1f2 stopping rule is insensitive to the term budget") {
  SpecFunConfig doubled;
  doubled.max_series_terms = 20000;
  for (double z : {-300.0, -50.0, -5.0, 0.5, 20.0, 200.0}) {
    const double a = hyp1f2_series(2.5, 5.0, 5.5, z).value;
    const double b = hyp1f2_series(2.5, 5.0, 5.5, z, doubled).value;
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
  }
}

TEST_CASE("hyp1f2 extended-precision series") {
  CHECK(rel_err(hyp1f2_series_extended(2.5, 5.0, 5.5, -100.0).value,
                0.004360531388273177327746) < 1e-13);
  CHECK(rel_err(hyp1f2_series_extended(1.5, 4.0, 4.5, -300.0).value,
                0.004976519699772370527548) < 1e-12);
}

TEST_CASE("hyp1f2 negative-argument routing") {
  const RoutedValue small = hyp1f2_negative(2.5, 5.0, 5.5, 25.0);
  CHECK(small.route == Hyp1f2Route::series);
  CHECK(rel_err(small.value, 0.1097511199949044398749) < 1e-12);

  const RoutedValue gap = hyp1f2_negative(2.5, 5.0, 5.5, 100.0);
  CHECK(gap.rel_error_estimate <= 1e-10);
  CHECK(rel_err(gap.value, 0.004360531388273177327746) < 1e-11);

  const RoutedValue far = hyp1f2_negative(2.5, 5.0, 5.5, 1000.0);
  CHECK(far.route == Hyp1f2Route::asymptotic);
  CHECK(rel_err(far.value, 1.483046683575338102197e-5) < 1e-11);

  const RoutedValue beyond = hyp1f2_negative(2.5, 5.0, 5.5, 1e6);
  CHECK(beyond.route == Hyp1f2Route::asymptotic);
  CHECK(beyond.rel_error_estimate < 1e-12);
}

TEST_CASE("asymptotic expansion agrees with a quad-precision series") {
  // Where the expansion is accurate the extended series still converges,
  // so the two independent routes must agree.
  for (double x : {150.0, 300.0, 600.0}) {
    const AsymptoticValue av = hyp1f2_negative_asymptotic(3.0, 6.0, 6.5, x);
    const SeriesValue sv = hyp1f2_series_extended(3.0, 6.0, 6.5, -x);
    REQUIRE(sv.abs_error_estimate < 1e-12 * std::abs(sv.value));
    CHECK(rel_err(av.value, sv.value) < 1e-10);
  }
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int k = 0; k < 1000; ++k) s.add(1e-16);
  s.add(-1.0);
  CHECK(rel_err(s.value(), 1e-13) < 1e-12);
}
