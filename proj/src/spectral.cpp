#include "cokrig/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cokrig/errors.hpp"
#include "cokrig/quadrature.hpp"
#include "cokrig/specfun.hpp"

namespace cokrig {

namespace {

using specfun::ln_gamma;

void check_dimension(int d) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
}

// w^{1 - d/2} J_{d/2 - 1}(w), smooth in w >= 0.
double hankel_kernel(double w, int d) {
  constexpr double sqrt_2_over_pi = 0.79788456080286535588;
  switch (d) {
    case 1:
      return sqrt_2_over_pi * std::cos(w);
    case 2:
      return specfun::bessel_j(0.0, w);
    default:
      if (w < 1e-4) return sqrt_2_over_pi * (1.0 - w * w / 6.0);
      return sqrt_2_over_pi * std::sin(w) / w;
  }
}

}  // namespace

const char* to_string(GwSdfBranch branch) {
  switch (branch) {
    case GwSdfBranch::series:
      return "series";
    case GwSdfBranch::asymptotic:
      return "asymptotic";
    case GwSdfBranch::extended_series:
      return "extended series";
    case GwSdfBranch::hankel:
      return "hankel";
  }
  return "unknown";
}

double matern_sdf(double z, const MaternParams& p, int d) {
  p.validate();
  check_dimension(d);
  if (!(z >= 0.0)) throw DomainError("matern_sdf: frequency must be nonnegative");
  const double half = p.nu + 0.5 * d;
  const double log_c = ln_gamma(half) - 0.5 * d * std::log(std::numbers::pi) - ln_gamma(p.nu);
  const double az = p.alpha * z;
  return std::exp(log_c + d * std::log(p.alpha) - half * std::log1p(az * az));
}

double gw_sdf_constant(int d, double mu, double kappa) {
  check_dimension(d);
  const double dd = static_cast<double>(d);
  const double log_pi_term = -0.5 * dd * std::log(std::numbers::pi);
  if (kappa > 0.0) {
    const double log_l = -dd * std::numbers::ln2 + log_pi_term + ln_gamma(mu + 1.0) +
                         ln_gamma(2.0 * kappa + dd) - ln_gamma(kappa + 0.5 * dd) -
                         ln_gamma(mu + dd + 1.0 + 2.0 * kappa) + ln_gamma(kappa) -
                         std::log(specfun::beta_fn(2.0 * kappa, mu + 1.0));
    return std::exp(log_l);
  }
  const double log_l = (1.0 - dd) * std::numbers::ln2 + log_pi_term + ln_gamma(mu + 1.0) +
                       ln_gamma(dd) - ln_gamma(0.5 * dd) - ln_gamma(mu + dd + 1.0);
  return std::exp(log_l);
}

GwSdfValue gw_sdf_detailed(double z, const GWParams& p, int d) {
  p.validate_in_dimension(d);
  if (!(z >= 0.0)) throw DomainError("gw_sdf: frequency must be nonnegative");
  const double zeta = 0.5 * (d + 1) + p.kappa;
  const double scale = gw_sdf_constant(d, p.mu, p.kappa) * std::pow(p.beta, d);
  const double zb = z * p.beta;
  const specfun::RoutedValue h = specfun::hyp1f2_negative(
      zeta, zeta + 0.5 * p.mu, zeta + 0.5 * p.mu + 0.5, 0.25 * zb * zb);
  if (h.rel_error_estimate <= 1e-10) {
    GwSdfBranch branch = GwSdfBranch::series;
    if (h.route == specfun::Hyp1f2Route::asymptotic) branch = GwSdfBranch::asymptotic;
    if (h.route == specfun::Hyp1f2Route::extended_series) branch = GwSdfBranch::extended_series;
    return {scale * h.value, branch};
  }
  return {gw_hankel_sdf(z, p, d), GwSdfBranch::hankel};
}

double hankel_sdf_oracle(const RadialFunction& phi, double z, int d, double r_max) {
  check_dimension(d);
  if (!(z >= 0.0)) throw DomainError("hankel_sdf_oracle: frequency must be nonnegative");
  if (!(r_max > 0.0)) throw DomainError("hankel_sdf_oracle: r_max must be positive");
  if (std::abs(phi(r_max)) > 1e-12)
    throw TruncationError("hankel_sdf_oracle: |phi(r_max)| exceeds 1e-12");

  const double width = std::min(std::numbers::pi / std::max(z, 1.0), r_max / 32.0);
  const auto panels = static_cast<long>(std::ceil(r_max / width));
  const double h = r_max / static_cast<double>(panels);
  const auto& rule = quadrature::gauss_legendre_64();
  const auto integrand = [&](double u) {
    return std::pow(u, d - 1) * hankel_kernel(u * z, d) * phi(u);
  };
  specfun::CompensatedSum total;
  for (long k = 0; k < panels; ++k) {
    const double a = h * static_cast<double>(k);
    total.add(quadrature::integrate_fixed(integrand, a, a + h, rule));
  }
  return std::pow(2.0 * std::numbers::pi, -0.5 * d) * total.value();
}

double matern_hankel_sdf(double z, const MaternParams& p, int d) {
  p.validate();
  const double r_max = p.alpha * (2.0 * p.nu + 60.0);
  return hankel_sdf_oracle([&p](double r) { return matern(r, p); }, z, d, r_max);
}

double gw_hankel_sdf(double z, const GWParams& p, int d) {
  p.validate_in_dimension(d);
  return hankel_sdf_oracle([&p](double r) { return gen_wendland(r, p, 1e-14); }, z, d, p.beta);
}

Matrix2 biv_sdf_matrix(double z, const BivMatern& th, int d) {
  const double f12 = th.rho12 * th.sigma11 * th.sigma22 * matern_sdf(z, th.component(1, 2), d);
  return {th.sigma11 * th.sigma11 * matern_sdf(z, th.component(1, 1), d), f12, f12,
          th.sigma22 * th.sigma22 * matern_sdf(z, th.component(2, 2), d)};
}

Matrix2 biv_sdf_matrix(double z, const BivGW& la, int d) {
  const double f12 = la.rho12 * la.sigma11 * la.sigma22 * gw_sdf(z, la.component(1, 2), d);
  return {la.sigma11 * la.sigma11 * gw_sdf(z, la.component(1, 1), d), f12, f12,
          la.sigma22 * la.sigma22 * gw_sdf(z, la.component(2, 2), d)};
}

Matrix2 biv_sdf_matrix(double z, const BivModel& model, int d) {
  return std::visit([&](const auto& m) { return biv_sdf_matrix(z, m, d); }, model);
}

}  // namespace cokrig
