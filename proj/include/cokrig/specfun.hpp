#pragma once

// Special functions used by the covariance models and their spectral
// densities: log-gamma, beta, modified Bessel K, Bessel J and the
// generalized hypergeometric 1F2.
//
// Every function here is a pure function of its arguments.

namespace cokrig::specfun {

struct SpecFunConfig {
  double rel_tol = 1e-12;
  int max_series_terms = 10000;
  // |z| beyond which the 1F2 power series is not attempted at all.
  double onef2_series_cutoff = 2500.0;
  // Relative rounding error the 1F2 power series may carry before it is
  // declined with PrecisionLossError.
  double onef2_max_rel_error = 1e-10;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

double ln_gamma(double x);

double beta_fn(double a, double b);

struct BesselKValue {
  double value = 0.0;
  bool underflow = false;  // true when the exact value is below the double range
};

/// K_nu(x) for 0 <= nu <= 50 and x > 0. Half-integer orders use the
/// terminating closed form, every other order goes through a
/// Temme/Steed evaluation.
BesselKValue bessel_k_checked(double nu, double x);

inline double bessel_k(double nu, double x) { return bessel_k_checked(nu, x).value; }

/// K_{m+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_{k=0}^m (m+k)! / (k! (m-k)!) (2x)^{-k}.
double bessel_k_half_integer(int m, double x);

/// J_order(x) for order >= -1/2 and x >= 0 (x > 0 when order < 0).
double bessel_j(double order, double x);

/// Power series of 1F2(a; b, c; z) with compensated summation.
struct SeriesValue {
  double value = 0.0;
  double abs_error_estimate = 0.0;  // rounding error bound of the summation
  int terms = 0;
};

SeriesValue hyp1f2_series(double a, double b, double c, double z,
                          const SpecFunConfig& cfg = {});

/// The same power series summed in quad precision (__float128 where the
/// compiler has it, long double otherwise); the error estimate includes the
/// final rounding to double.
SeriesValue hyp1f2_series_extended(double a, double b, double c, double z,
                                   const SpecFunConfig& cfg = {});

/// 1F2(a; b, c; z) by its power series. Throws CutoffError beyond the
/// configured |z| cutoff, PrecisionLossError when cancellation would
/// exceed cfg.onef2_max_rel_error, ConvergenceError past max_series_terms.
double hyp1f2(double a, double b, double c, double z, const SpecFunConfig& cfg = {});

/// Large-argument expansion of 1F2(a; b, c; -x), x > 0: an algebraic part
/// x^{-a} 3F0(a, 1+a-b, 1+a-c;; -1/x) plus an oscillatory part
/// y^{nu} cos(y + pi nu / 2 + ...) with y = 2 sqrt(x), nu = a - b - c + 1/2.
/// Both asymptotic series are truncated at their smallest term.
struct AsymptoticValue {
  double value = 0.0;
  double abs_error_estimate = 0.0;  // size of the first neglected terms
};

AsymptoticValue hyp1f2_negative_asymptotic(double a, double b, double c, double x);

enum class Hyp1f2Route { series, asymptotic, extended_series };

struct RoutedValue {
  double value = 0.0;
  double rel_error_estimate = 0.0;
  Hyp1f2Route route = Hyp1f2Route::series;
};

/// 1F2(a; b, c; -x) for x >= 0 through whichever of the power series and
/// the large-argument expansion carries the smaller error estimate; when
/// neither reaches cfg.onef2_max_rel_error inside the series cutoff, the
/// series is re-summed in extended precision.
RoutedValue hyp1f2_negative(double a, double b, double c, double x,
                            const SpecFunConfig& cfg = {});

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cokrig::specfun
