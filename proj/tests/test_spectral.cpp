#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cokrig/covmodels.hpp"
#include "cokrig/errors.hpp"
#include "cokrig/quadrature.hpp"
#include "cokrig/spectral.hpp"

using namespace cokrig;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

const BivMatern kTheta0{1.2, 1.1, 0.2, 1.5, 0.05, 0.09, 0.07};
const BivGW kLambda1{1.2, 1.1, 0.2, 5.0, 1.0, 0.297, 0.535, 0.416};

// int_{R^d} f(|w|) dw for a radial density, with z = t / (1 - t).
double total_mass(const std::function<double(double)>& f, int d) {
  const double area = d == 1 ? 2.0 : (d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  const auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double z = t / (1.0 - t);
    return std::pow(z, d - 1) * f(z) / ((1.0 - t) * (1.0 - t));
  };
  return area * quadrature::integrate_adaptive(g, 0.0, 1.0, 1e-12).value;
}

double log_slope(const std::function<double(double)>& f, double z) {
  return std::log(f(2.0 * z) / f(z)) / std::numbers::ln2;
}

}  // namespace

TEST_CASE("Matern density examples") {
  CHECK(rel_err(matern_sdf(0.0, {0.5, 1.0}, 1), 1.0 / std::numbers::pi) < 1e-14);
  CHECK(rel_err(matern_sdf(1.0, {0.5, 1.0}, 1), 0.5 / std::numbers::pi) < 1e-14);
  // nu = 3/2, d = 3: Gamma(3) / (pi^{3/2} Gamma(3/2)) = 4 / pi^2
  CHECK(rel_err(matern_sdf(0.0, {1.5, 1.0}, 3), 4.0 / (std::numbers::pi * std::numbers::pi)) < 1e-13);
  for (int d = 1; d <= 3; ++d)
    for (double z : {0.0, 0.3, 4.0, 70.0}) {
      const double a = 0.37;
      CHECK(rel_err(matern_sdf(z, {1.3, a}, d), std::pow(a, d) * matern_sdf(a * z, {1.3, 1.0}, d)) <
            1e-12);
    }
  CHECK_THROWS_AS(matern_sdf(-1.0, {0.5, 1.0}, 1), DomainError);
  CHECK_THROWS_AS(matern_sdf(1.0, {0.5, 1.0}, 4), DomainError);
}

TEST_CASE("Matern densities integrate to the variance") {
  for (double nu : {0.5, 1.5})
    for (int d : {1, 3}) {
      const MaternParams p{nu, 0.8};
      CHECK(total_mass([&](double z) { return matern_sdf(z, p, d); }, d) ==
            doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("Wendland density constants and values") {
  // mpmath
  CHECK(rel_err(gw_sdf_constant(2, 5.0, 1.0), 0.006631455962162306) < 1e-12);
  CHECK(rel_err(gw_sdf_constant(1, 5.0, 0.0), 0.05305164769729845) < 1e-12);
  CHECK(rel_err(gw_sdf_constant(3, 4.0, 0.5), 7.105131388031042e-4) < 1e-12);

  const GWParams a{5.0, 1.0, 0.297};
  const std::vector<std::pair<double, double>> d2 = {
      {0.0, 5.849540989663748e-4},   {1.0, 5.837825719073790e-4},
      {10.0, 4.785898520405095e-4},  {100.0, 3.701907994405793e-7},
      {300.0, 1.569007942416175e-9}, {1000.0, 3.825975106351165e-12}};
  for (const auto& [z, want] : d2) CHECK(rel_err(gw_sdf(z, a, 2), want) < 1e-9);

  const GWParams b{5.0, 0.0, 0.3};
  const std::vector<std::pair<double, double>> d1 = {
      {0.0, 0.01591549430918953},    {1.0, 0.01588994139723437},
      {10.0, 0.01359682287124547},   {100.0, 5.234562182738250e-4},
      {300.0, 5.885897862805747e-5}, {1000.0, 5.304457430493558e-6}};
  for (const auto& [z, want] : d1) CHECK(rel_err(gw_sdf(z, b, 1), want) < 1e-9);
  CHECK(gw_sdf_detailed(1e5, a, 2).branch == GwSdfBranch::asymptotic);
  CHECK(gw_sdf_detailed(1.0, a, 2).branch == GwSdfBranch::series);
}

TEST_CASE("closed-form densities agree with the Hankel transform") {
  for (int d = 1; d <= 3; ++d)
    for (double z : {0.0, 1.0, 10.0, 100.0}) {
      const MaternParams m{1.5, 0.07};
      CHECK(rel_err(matern_sdf(z, m, d), matern_hankel_sdf(z, m, d)) < 1e-9);
    }
  for (int d = 1; d <= 3; ++d)
    for (double z : {0.0, 2.0, 30.0, 200.0}) {
      const GWParams w{5.0, 1.0, 0.416};
      CHECK(rel_err(gw_sdf(z, w, d), gw_hankel_sdf(z, w, d)) < 1e-9);
    }
}

TEST_CASE("Wendland density integrates to the variance and is positive") {
  for (int d : {1, 3}) {
    const GWParams w{5.0, 1.0, 0.8};
    CHECK(total_mass([&](double z) { return gw_sdf(z, w, d); }, d) ==
          doctest::Approx(1.0).epsilon(1e-7));
  }
  const GWParams w{5.0, 1.0, 0.297};
  for (double z = 0.0; z < 2000.0; z += 3.7) CHECK(gw_sdf(z, w, 2) > 0.0);
}

TEST_CASE("tail decay rates") {
  for (int d = 1; d <= 3; ++d) {
    const MaternParams m{1.3, 0.05};
    CHECK(log_slope([&](double z) { return matern_sdf(z, m, d); }, 1e6) ==
          doctest::Approx(-(2.0 * 1.3 + d)).epsilon(1e-4));
    const GWParams w{5.0, 1.0, 0.297};
    CHECK(log_slope([&](double z) { return gw_sdf(z, w, d); }, 1e6) ==
          doctest::Approx(-(d + 1.0 + 2.0)).epsilon(1e-3));
  }
}

TEST_CASE("spectral matrices and the rho bounds") {
  for (double z = 0.01; z < 1e4; z *= 1.2) {
    CHECK(biv_sdf_matrix(z, kTheta0, 2).det() > 0.0);
    CHECK(biv_sdf_matrix(z, kLambda1, 2).det() > 0.0);
  }
  // At rho slightly below the bound the spectral matrix stays nonnegative;
  // slightly above, it fails somewhere.
  const auto min_det_ratio = [](const BivModel& m) {
    double worst = 1e300;
    for (double z = 0.01; z < 1e4; z *= 1.01) {
      const Matrix2 f = biv_sdf_matrix(z, m, 2);
      worst = std::min(worst, f.det() / (f.m11 * f.m22));
    }
    return worst;
  };
  BivMatern th = kTheta0;
  const double bm = biv_matern_rho_bound(th, 2);
  th.rho12 = bm * (1.0 - 1e-6);
  CHECK(min_det_ratio(BivModel{th}) >= 0.0);
  th.rho12 = std::min(0.999, bm * 1.01);
  CHECK(min_det_ratio(BivModel{th}) < 0.0);
  BivGW la = kLambda1;
  const double bg = biv_gw_rho_bound(la, 2);
  la.rho12 = bg * (1.0 - 1e-6);
  CHECK(min_det_ratio(BivModel{la}) >= 0.0);
  la.rho12 = std::min(0.999, bg * 1.01);
  CHECK(min_det_ratio(BivModel{la}) < 0.0);
}

TEST_CASE("Hankel oracle refuses a truncated integrand") {
  CHECK_THROWS_AS(hankel_sdf_oracle([](double r) { return std::exp(-r); }, 1.0, 2, 1.0),
                  TruncationError);
  CHECK_THROWS_AS(hankel_sdf_oracle([](double) { return 0.0; }, -1.0, 2, 1.0), DomainError);
}
