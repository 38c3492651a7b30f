#include "cokrig/covmodels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "cokrig/errors.hpp"
#include "cokrig/quadrature.hpp"
#include "cokrig/spectral.hpp"
#include "cokrig/specfun.hpp"

namespace cokrig {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void check_dimension(int d) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
}

// Minimise a smooth function of t >= 0 given as log values: t = 0, a
// logarithmic grid, the t -> infinity limit, then golden-section
// refinement (in log t) of the best grid cell.
double log_infimum(const std::function<double(double)>& log_f, double log_at_infinity,
                   double t_lo, double t_hi, const InfimumOptions& opt) {
  if (opt.grid_points < 3) throw DomainError("InfimumOptions: grid_points must be >= 3");
  if (!(opt.rel_tol > 0.0)) throw DomainError("InfimumOptions: rel_tol must be positive");

  double best = std::min(log_f(0.0), log_at_infinity);
  const int n = opt.grid_points;
  const double s_lo = std::log(t_lo);
  const double s_hi = std::log(t_hi);
  const double step = (s_hi - s_lo) / static_cast<double>(n - 1);
  std::vector<double> values(static_cast<std::size_t>(n));
  int arg = 0;
  for (int i = 0; i < n; ++i) {
    values[static_cast<std::size_t>(i)] = log_f(std::exp(s_lo + step * i));
    if (values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(arg)]) arg = i;
  }
  best = std::min(best, values[static_cast<std::size_t>(arg)]);

  double a = s_lo + step * (arg - 1);
  double b = s_lo + step * (arg + 1);
  const auto g = [&](double s) { return log_f(std::exp(s)); };
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int iter = 0; iter < 200 && (b - a) > opt.rel_tol; ++iter) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return std::min({best, gc, gd});
}

double gw_integrand_tol_scale(const GWParams& p) {
  return 1.0 / (2.0 * p.kappa * specfun::beta_fn(2.0 * p.kappa, p.mu + 1.0));
}

}  // namespace

void MaternParams::validate() const {
  if (!positive_finite(nu)) throw DomainError("Matern: nu must be positive");
  if (!positive_finite(alpha)) throw DomainError("Matern: alpha must be positive");
}

void GWParams::validate() const {
  if (!positive_finite(mu)) throw DomainError("Generalized Wendland: mu must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw DomainError("Generalized Wendland: kappa must be nonnegative");
  if (!positive_finite(beta)) throw DomainError("Generalized Wendland: beta must be positive");
}

void GWParams::validate_in_dimension(int d) const {
  validate();
  check_dimension(d);
  const double lower = 0.5 * (d + 1) + kappa;
  if (mu < lower)
    throw DomainError("Generalized Wendland: mu = " + std::to_string(mu) +
                      " is below (d+1)/2 + kappa = " + std::to_string(lower));
}

double Matrix2::symmetric_spectral_norm() const {
  const double mean = 0.5 * (m11 + m22);
  const double half_diff = 0.5 * (m11 - m22);
  const double radius = std::hypot(half_diff, m12);
  return std::max(std::abs(mean + radius), std::abs(mean - radius));
}

double matern(double r, const MaternParams& p) {
  p.validate();
  if (!(r >= 0.0)) throw DomainError("matern: distance must be nonnegative");
  if (r == 0.0) return 1.0;
  const double x = r / p.alpha;
  specfun::BesselKValue k;
  try {
    k = specfun::bessel_k_checked(p.nu, x);
  } catch (const RangeError&) {
    // K overflows only for x far below the range scale.
    return p.nu > 1.0 ? 1.0 - x * x / (4.0 * (p.nu - 1.0)) : 1.0;
  }
  if (k.underflow) return 0.0;
  const double log_scale = (1.0 - p.nu) * std::numbers::ln2 - specfun::ln_gamma(p.nu) +
                           p.nu * std::log(x);
  return std::min(1.0, std::exp(log_scale) * k.value);
}

double askey(double r, double mu, double beta) {
  if (!(r >= 0.0)) throw DomainError("askey: distance must be nonnegative");
  const double x = r / beta;
  if (x >= 1.0) return 0.0;
  return std::pow(1.0 - x, mu);
}

double gen_wendland(double r, const GWParams& p, double abs_tol) {
  p.validate();
  if (!(r >= 0.0)) throw DomainError("gen_wendland: distance must be nonnegative");
  if (p.kappa == 0.0) return askey(r, p.mu, p.beta);
  const double x = r / p.beta;
  if (x >= 1.0) return 0.0;
  if (x == 0.0) return 1.0;

  // u^2 = x^2 + (1 - x^2) v followed by v = s^{1/kappa} maps the integral to
  // (1 - x^2)^kappa / (2 kappa B) * int_0^1 (1 - u(s))^mu ds.
  // For kappa > 1/2, u(s) ~ s^{1/(2 kappa)} near s = 0 when x is small, so
  // there the integral is taken over w = sqrt(v) = s^{1/(2 kappa)} instead,
  // with integrand 2 kappa w^{2 kappa - 1} (1 - u(w))^mu and u(w) smooth.
  const double one_minus_x2 = (1.0 - x) * (1.0 + x);
  const double inv_kappa = 1.0 / p.kappa;
  const auto one_minus_u = [&](double v, double one_minus_v) {
    const double u = std::sqrt(x * x + one_minus_x2 * v);
    return one_minus_x2 * one_minus_v / (1.0 + u);
  };
  const auto integrand_s = [&](double s) {
    const double log_s = std::log(s);
    const double v = std::exp(log_s * inv_kappa);
    return std::pow(one_minus_u(v, -std::expm1(log_s * inv_kappa)), p.mu);
  };
  const auto integrand_w = [&](double w) {
    const double v = w * w;
    return 2.0 * p.kappa * std::pow(w, 2.0 * p.kappa - 1.0) *
           std::pow(one_minus_u(v, (1.0 - w) * (1.0 + w)), p.mu);
  };
  const double scale = gw_integrand_tol_scale(p) * std::pow(one_minus_x2, p.kappa);
  const auto res = p.kappa > 0.5
                       ? quadrature::integrate_adaptive(integrand_w, 0.0, 1.0, abs_tol / scale)
                       : quadrature::integrate_adaptive(integrand_s, 0.0, 1.0, abs_tol / scale);
  return std::clamp(scale * res.value, 0.0, 1.0);
}

Matrix2 biv_matern_cov(double h, const BivMatern& th) {
  if (!(h >= 0.0)) throw DomainError("biv_matern_cov: distance must be nonnegative");
  const double c12 = th.rho12 * th.sigma11 * th.sigma22 * matern(h, th.component(1, 2));
  return {th.sigma11 * th.sigma11 * matern(h, th.component(1, 1)), c12, c12,
          th.sigma22 * th.sigma22 * matern(h, th.component(2, 2))};
}

Matrix2 biv_gw_cov(double h, const BivGW& la, double abs_tol) {
  if (!(h >= 0.0)) throw DomainError("biv_gw_cov: distance must be nonnegative");
  const double c12 =
      la.rho12 * la.sigma11 * la.sigma22 * gen_wendland(h, la.component(1, 2), abs_tol);
  return {la.sigma11 * la.sigma11 * gen_wendland(h, la.component(1, 1), abs_tol), c12, c12,
          la.sigma22 * la.sigma22 * gen_wendland(h, la.component(2, 2), abs_tol)};
}

Matrix2 biv_cov(double h, const BivModel& model) {
  return std::visit(
      [h](const auto& m) -> Matrix2 {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, BivMatern>)
          return biv_matern_cov(h, m);
        else
          return biv_gw_cov(h, m);
      },
      model);
}

double biv_matern_rho_bound(const BivMatern& th, int d, const InfimumOptions& opt) {
  check_dimension(d);
  if (!positive_finite(th.nu) || !positive_finite(th.alpha11) ||
      !positive_finite(th.alpha22) || !positive_finite(th.alpha12))
    throw DomainError("biv_matern_rho_bound: nu and ranges must be positive");
  const double nu = th.nu;
  const double half = nu + 0.5 * d;
  const double a11 = 1.0 / (th.alpha11 * th.alpha11);
  const double a22 = 1.0 / (th.alpha22 * th.alpha22);
  const double a12 = 1.0 / (th.alpha12 * th.alpha12);
  const auto log_f = [&](double t) {
    const double t2 = t * t;
    return (2.0 * nu + d) * std::log(a12 + t2) - half * (std::log(a11 + t2) + std::log(a22 + t2));
  };
  const double log_prefactor = 4.0 * nu * std::log(th.alpha12) -
                               2.0 * nu * (std::log(th.alpha11) + std::log(th.alpha22));
  const double max_range = std::max({th.alpha11, th.alpha22, th.alpha12});
  const double min_range = std::min({th.alpha11, th.alpha22, th.alpha12});
  const double inf = log_infimum(log_f, 0.0, 1e-3 / max_range, 1e3 / min_range, opt);
  return std::exp(0.5 * (log_prefactor + inf));
}

double biv_gw_rho_bound(const BivGW& la, int d, const InfimumOptions& opt) {
  check_dimension(d);
  const GWParams p11 = la.component(1, 1);
  const GWParams p22 = la.component(2, 2);
  const GWParams p12 = la.component(1, 2);
  p11.validate_in_dimension(d);
  p22.validate_in_dimension(d);
  p12.validate_in_dimension(d);
  const auto log_f = [&](double z) {
    const double w11 = gw_sdf(z, p11, d);
    const double w22 = gw_sdf(z, p22, d);
    const double w12 = gw_sdf(z, p12, d);
    if (!(w11 > 0.0) || !(w22 > 0.0) || !(w12 != 0.0))
      return -std::numeric_limits<double>::infinity();
    return std::log(w11) + std::log(w22) - 2.0 * std::log(std::abs(w12));
  };
  const double log_limit =
      (1.0 + 2.0 * la.kappa) * (2.0 * std::log(la.beta12) - std::log(la.beta11) -
                                std::log(la.beta22));
  const double max_range = std::max({la.beta11, la.beta22, la.beta12});
  const double min_range = std::min({la.beta11, la.beta22, la.beta12});
  const double inf = log_infimum(log_f, log_limit, 1e-3 / max_range, 1e3 / min_range, opt);
  if (inf == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(0.5 * inf);
}

double rho_bound(const BivModel& model, int d, const InfimumOptions& opt) {
  return std::visit(
      [&](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, BivMatern>)
          return biv_matern_rho_bound(m, d, opt);
        else
          return biv_gw_rho_bound(m, d, opt);
      },
      model);
}

void validate_parameters(const BivMatern& th, int d) {
  check_dimension(d);
  if (!positive_finite(th.sigma11) || !positive_finite(th.sigma22))
    throw DomainError("bivariate Matern: sigma11 and sigma22 must be positive");
  if (!(std::abs(th.rho12) < 1.0)) throw DomainError("bivariate Matern: |rho12| must be < 1");
  if (!positive_finite(th.nu)) throw DomainError("bivariate Matern: nu must be positive");
  if (!positive_finite(th.alpha11) || !positive_finite(th.alpha22) ||
      !positive_finite(th.alpha12))
    throw DomainError("bivariate Matern: ranges must be positive");
}

void validate_parameters(const BivGW& la, int d) {
  check_dimension(d);
  if (!positive_finite(la.sigma11) || !positive_finite(la.sigma22))
    throw DomainError("bivariate Wendland: sigma11 and sigma22 must be positive");
  if (!(std::abs(la.rho12) < 1.0)) throw DomainError("bivariate Wendland: |rho12| must be < 1");
  if (!positive_finite(la.beta11) || !positive_finite(la.beta22) ||
      !positive_finite(la.beta12))
    throw DomainError("bivariate Wendland: ranges must be positive");
  la.component(1, 1).validate_in_dimension(d);
}

void validate_parameters(const BivModel& model, int d) {
  std::visit([d](const auto& m) { validate_parameters(m, d); }, model);
}

namespace {

template <class Model>
void validate_rho(const Model& m, int d, const char* family) {
  const double bound = rho_bound(BivModel{m}, d);
  if (std::abs(m.rho12) >= bound - 1e-12)
    throw DomainError(std::string("bivariate ") + family + ": |rho12| = " +
                      std::to_string(std::abs(m.rho12)) + " is not below the validity bound " +
                      std::to_string(bound));
}

}  // namespace

void validate(const BivMatern& th, int d) {
  validate_parameters(th, d);
  validate_rho(th, d, "Matern");
}

void validate(const BivGW& la, int d) {
  validate_parameters(la, d);
  validate_rho(la, d, "Wendland");
}

void validate(const BivModel& model, int d) {
  std::visit([d](const auto& m) { validate(m, d); }, model);
}

double matern_equivalent_smoothness(const BivModel& model) {
  if (const auto* m = std::get_if<BivMatern>(&model)) return m->nu;
  return std::get<BivGW>(model).kappa + 0.5;
}

}  // namespace cokrig
