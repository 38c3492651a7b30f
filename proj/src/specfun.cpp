#include "cokrig/specfun.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cokrig/errors.hpp"

namespace cokrig::specfun {

namespace {

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

// log|Gamma(v)| and its sign; v must not be a pole.
double signed_ln_gamma(double v, int& sign) {
  sign = 1;
  return boost::math::lgamma(v, &sign);
}

}  // namespace

void SpecFunConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1e-6))
    throw DomainError("SpecFunConfig: rel_tol must lie in (0, 1e-6)");
  if (max_series_terms < 100)
    throw DomainError("SpecFunConfig: max_series_terms must be >= 100");
  if (!(onef2_series_cutoff > 0.0))
    throw DomainError("SpecFunConfig: onef2_series_cutoff must be positive");
  if (!(onef2_max_rel_error > 0.0 && onef2_max_rel_error < 1.0))
    throw DomainError("SpecFunConfig: onef2_max_rel_error must lie in (0, 1)");
}

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("ln_gamma: argument must be positive and finite");
  return boost::math::lgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("beta_fn: arguments must be positive and finite");
  return boost::math::beta(a, b);
}

double bessel_k_half_integer(int m, double x) {
  if (m < 0) throw DomainError("bessel_k_half_integer: m must be nonnegative");
  if (!(x > 0.0)) throw DomainError("bessel_k_half_integer: x must be positive");
  double term = 1.0;
  double sum = 1.0;
  const double inv_2x = 0.5 / x;
  for (int k = 0; k < m; ++k) {
    term *= static_cast<double>(m + k + 1) * static_cast<double>(m - k) /
            static_cast<double>(k + 1) * inv_2x;
    sum += term;
  }
  return std::sqrt(std::numbers::pi * inv_2x) * std::exp(-x) * sum;
}

BesselKValue bessel_k_checked(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
  if (!(nu >= 0.0 && nu <= 50.0)) throw DomainError("bessel_k: order must lie in [0, 50]");

  // Leading behaviour sqrt(pi/(2x)) e^{-x}; once that is below the
  // normal range the value is reported as an underflow.
  if (x > 700.0) {
    const double log_lead = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x;
    if (log_lead < std::log(DBL_MIN)) return {0.0, true};
  }

  const double shifted = nu - 0.5;
  double value = 0.0;
  if (shifted >= 0.0 && std::floor(shifted) == shifted) {
    value = bessel_k_half_integer(static_cast<int>(shifted), x);
  } else {
    try {
      value = boost::math::cyl_bessel_k(nu, x);
    } catch (const std::overflow_error&) {
      throw RangeError("bessel_k: overflow for order " + std::to_string(nu) +
                       " at x = " + std::to_string(x));
    }
  }
  if (std::isinf(value))
    throw RangeError("bessel_k: overflow for order " + std::to_string(nu));
  if (value < DBL_MIN) return {value, true};
  return {value, false};
}

double bessel_j(double order, double x) {
  if (order < -0.5) throw DomainError("bessel_j: order must be >= -1/2");
  if (!(x >= 0.0)) throw DomainError("bessel_j: x must be nonnegative");
  if (x == 0.0) {
    if (order == 0.0) return 1.0;
    if (order > 0.0) return 0.0;
    throw DomainError("bessel_j: J of negative order is unbounded at 0");
  }
  if (order == -0.5) return std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x);
  if (order == 0.5) return std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
  return boost::math::cyl_bessel_j(order, x);
}

SeriesValue hyp1f2_series(double a, double b, double c, double z, const SpecFunConfig& cfg) {
  cfg.validate();
  if (is_nonpositive_integer(b) || is_nonpositive_integer(c))
    throw DomainError("hyp1f2: lower parameters must not be nonpositive integers");
  if (std::abs(z) > cfg.onef2_series_cutoff)
    throw CutoffError("hyp1f2: |z| = " + std::to_string(std::abs(z)) +
                      " exceeds the series cutoff " +
                      std::to_string(cfg.onef2_series_cutoff));

  CompensatedSum sum;
  double term = 1.0;
  // Each term carries up to ~(k+1) roundings from the product recurrence.
  double weighted_abs = 0.0;
  int small_run = 0;
  int k = 0;
  for (; k < cfg.max_series_terms; ++k) {
    sum.add(term);
    weighted_abs += static_cast<double>(k + 1) * std::abs(term);
    if (term == 0.0) break;  // a is a nonpositive integer: polynomial
    if (std::abs(term) < cfg.rel_tol * std::abs(sum.value())) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
    const double kk = static_cast<double>(k);
    term *= (a + kk) / ((b + kk) * (c + kk) * (kk + 1.0)) * z;
  }
  if (k == cfg.max_series_terms)
    throw ConvergenceError("hyp1f2: series did not converge within " +
                           std::to_string(cfg.max_series_terms) + " terms");
  return {sum.value(), DBL_EPSILON * weighted_abs, k + 1};
}

SeriesValue hyp1f2_series_extended(double a, double b, double c, double z,
                                   const SpecFunConfig& cfg) {
  cfg.validate();
  if (is_nonpositive_integer(b) || is_nonpositive_integer(c))
    throw DomainError("hyp1f2: lower parameters must not be nonpositive integers");
  if (std::abs(z) > cfg.onef2_series_cutoff)
    throw CutoffError("hyp1f2: |z| = " + std::to_string(std::abs(z)) +
                      " exceeds the series cutoff " +
                      std::to_string(cfg.onef2_series_cutoff));
#if defined(__SIZEOF_FLOAT128__)
  using wide = __float128;
  constexpr double wide_epsilon = 1.925929944387235853e-34;  // 2^-112
#else
  using wide = long double;
  constexpr double wide_epsilon = std::numeric_limits<long double>::epsilon();
#endif
  const auto wabs = [](wide v) { return v < 0 ? -v : v; };
  wide sum = 1.0;
  wide term = 1.0;
  wide weighted_abs = 1.0;
  int small_run = 0;
  int k = 0;
  for (; k < cfg.max_series_terms; ++k) {
    const wide kk = static_cast<wide>(k);
    term *= (static_cast<wide>(a) + kk) /
            ((static_cast<wide>(b) + kk) * (static_cast<wide>(c) + kk) * (kk + 1)) *
            static_cast<wide>(z);
    sum += term;
    weighted_abs += (kk + 2) * wabs(term);
    if (term == 0) break;
    // Terms fall factorially once past the peak; stop far below double precision.
    if (wabs(term) < static_cast<wide>(1e-24) * wabs(sum)) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
  }
  if (k == cfg.max_series_terms)
    throw ConvergenceError("hyp1f2: series did not converge within " +
                           std::to_string(cfg.max_series_terms) + " terms");
  const double value = static_cast<double>(sum);
  const double rounding = static_cast<double>(weighted_abs) * wide_epsilon;
  return {value, std::max(rounding, 0.5 * DBL_EPSILON * std::abs(value)), k + 2};
}

double hyp1f2(double a, double b, double c, double z, const SpecFunConfig& cfg) {
  const SeriesValue s = hyp1f2_series(a, b, c, z, cfg);
  if (s.abs_error_estimate > cfg.onef2_max_rel_error * std::abs(s.value))
    throw PrecisionLossError("hyp1f2: cancellation in the series at z = " + std::to_string(z) +
                             " (estimated relative error " +
                             std::to_string(s.abs_error_estimate / std::abs(s.value)) + ")");
  return s.value;
}

AsymptoticValue hyp1f2_negative_asymptotic(double a, double b, double c, double x) {
  if (!(x > 0.0)) throw DomainError("hyp1f2_negative_asymptotic: x must be positive");
  if (is_nonpositive_integer(b) || is_nonpositive_integer(c))
    throw DomainError("hyp1f2: lower parameters must not be nonpositive integers");

  const double y = 2.0 * std::sqrt(x);
  const double nu = a - b - c + 0.5;
  int sgn_b = 1, sgn_c = 1;
  const double lg_bc = signed_ln_gamma(b, sgn_b) + signed_ln_gamma(c, sgn_c);

  // Algebraic part: Gamma(b)Gamma(c) / (Gamma(b-a)Gamma(c-a)) x^{-a} 3F0(...; -1/x).
  double algebraic = 0.0;
  double algebraic_err = 0.0;
  if (!is_nonpositive_integer(b - a) && !is_nonpositive_integer(c - a)) {
    int s1 = 1, s2 = 1;
    const double ln_amp = lg_bc - signed_ln_gamma(b - a, s1) - signed_ln_gamma(c - a, s2) -
                          a * std::log(x);
    const double amp = sgn_b * sgn_c * s1 * s2 * std::exp(ln_amp);
    CompensatedSum h;
    double term = 1.0;
    double neglected = 0.0;
    for (int k = 0; k < 500; ++k) {
      h.add(term);
      const double kk = static_cast<double>(k);
      const double next = term * (a + kk) * (1.0 + a - b + kk) * (1.0 + a - c + kk) /
                          (kk + 1.0) * (-1.0 / x);
      if (next == 0.0) {
        neglected = 0.0;
        break;
      }
      if (std::abs(next) >= std::abs(term)) {
        neglected = std::abs(term);
        break;
      }
      term = next;
      neglected = std::abs(term);
      if (std::abs(term) < 0.25 * DBL_EPSILON * std::abs(h.value())) {
        h.add(term);
        break;
      }
    }
    algebraic = amp * h.value();
    algebraic_err = std::abs(amp) * neglected;
  }

  // Oscillatory part: Gamma(b)Gamma(c) / (Gamma(a) sqrt(pi)) 2^{-nu}
  //   Re[ e^{i(y + pi nu / 2)} y^nu sum_k c_k y^{-k} ],
  // where the c_k solve the differential equation of 1F2 order by order.
  double oscillatory = 0.0;
  double oscillatory_err = 0.0;
  if (!is_nonpositive_integer(a)) {
    int sa = 1;
    const double ln_amp = lg_bc - signed_ln_gamma(a, sa) - 0.5 * std::log(std::numbers::pi) -
                          nu * std::log(2.0) + nu * std::log(y);
    const double amp = sgn_b * sgn_c * sa * std::exp(ln_amp);

    using cplx = std::complex<double>;
    const double beta1 = 2.0 * b - 2.0;
    const double beta2 = 2.0 * c - 2.0;
    const auto q1 = [&](double m) {
      return cplx(0.0, m * (m + beta2) + (2.0 * m + 1.0 + beta2) * (m + 1.0 + beta1));
    };
    const auto q0 = [&](double m) { return m * (m + beta1) * (m + beta2); };

    cplx prev2(0.0, 0.0);
    cplx prev1(1.0, 0.0);
    cplx series = prev1;
    double last_mag = 1.0;
    double err = 0.0;
    const double inv_y = 1.0 / y;
    double y_pow = 1.0;
    for (int k = 1; k < 200; ++k) {
      const double kk = static_cast<double>(k);
      const cplx ck = -(q1(nu - kk + 1.0) * prev1 + q0(nu - kk + 2.0) * prev2) / (2.0 * kk);
      y_pow *= inv_y;
      const cplx t = ck * y_pow;
      const double mag = std::abs(t);
      if (mag > last_mag) {
        err = last_mag;
        break;
      }
      series += t;
      last_mag = mag;
      err = mag;
      if (mag < 0.25 * DBL_EPSILON) break;
      prev2 = prev1;
      prev1 = ck;
    }
    const cplx phase = std::polar(1.0, y + 0.5 * std::numbers::pi * nu);
    oscillatory = amp * (phase * series).real();
    oscillatory_err = std::abs(amp) * err;
  }

  return {algebraic + oscillatory, algebraic_err + oscillatory_err};
}

RoutedValue hyp1f2_negative(double a, double b, double c, double x, const SpecFunConfig& cfg) {
  if (!(x >= 0.0)) throw DomainError("hyp1f2_negative: x must be nonnegative");
  if (x == 0.0) return {1.0, 0.0, Hyp1f2Route::series};

  RoutedValue best{0.0, std::numeric_limits<double>::infinity(), Hyp1f2Route::series};
  if (x <= cfg.onef2_series_cutoff) {
    const SeriesValue s = hyp1f2_series(a, b, c, -x, cfg);
    const double rel = s.value != 0.0 ? s.abs_error_estimate / std::abs(s.value)
                                      : std::numeric_limits<double>::infinity();
    best = {s.value, rel, Hyp1f2Route::series};
    if (rel <= 4.0 * DBL_EPSILON) return best;
  }
  // The expansion is useless for small arguments.
  if (x >= 4.0) {
    const AsymptoticValue av = hyp1f2_negative_asymptotic(a, b, c, x);
    const double rel = av.value != 0.0 ? av.abs_error_estimate / std::abs(av.value)
                                       : std::numeric_limits<double>::infinity();
    if (rel < best.rel_error_estimate) best = {av.value, rel, Hyp1f2Route::asymptotic};
  }
  // Between the two regimes neither double-precision route is accurate
  // enough; the series in extended precision absorbs the cancellation.
  if (best.rel_error_estimate > cfg.onef2_max_rel_error && x <= cfg.onef2_series_cutoff) {
    const SeriesValue s = hyp1f2_series_extended(a, b, c, -x, cfg);
    const double rel = s.value != 0.0 ? s.abs_error_estimate / std::abs(s.value)
                                      : std::numeric_limits<double>::infinity();
    if (rel < best.rel_error_estimate) best = {s.value, rel, Hyp1f2Route::extended_series};
  }
  return best;
}

}  // namespace cokrig::specfun
