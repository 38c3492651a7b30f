#pragma once

// Sufficient conditions for two bivariate models to induce equivalent
// Gaussian measures ("compatible" models), the constant linking the Matern
// and Wendland families, the range solver built on it, and a numerical
// diagnostic of spectral closeness at high frequency.

#include <array>
#include <string>
#include <vector>

#include "cokrig/covmodels.hpp"

namespace cokrig {

/// Relative slack of the structural hypotheses (nu = kappa + 1/2 etc.).
inline constexpr double kHypothesisSlack = 1e-12;

struct CompatReport {
  bool compatible = false;
  // Relative residuals of the equality condition for pairs 11, 22, 12.
  std::array<double, 3> residuals{0.0, 0.0, 0.0};
  std::vector<std::string> violations;  // named hypothesis violations
  double tolerance = 0.0;

  double residual(int i, int j) const;
};

/// mu Gamma(2 kappa + mu + 1) / Gamma(mu + 1). Throws OverflowError (with
/// the log value) when not representable.
double c_kappa_mu(double kappa, double mu);

/// Common smoothness and sigma_ii sigma_jj rho_ij / alpha_ij^{2 nu} equal.
CompatReport matern_matern_compatible(const BivMatern& th0, const BivMatern& th1, int d,
                                      double tol);

/// Common mu and kappa, mu > d + 1/2 + kappa, and
/// sigma_ii sigma_jj rho_ij / beta_ij^{1 + 2 kappa} equal.
CompatReport gw_gw_compatible(const BivGW& la0, const BivGW& la1, int d, double tol);

/// nu = kappa + 1/2, mu > d + 1/2 + kappa, and
/// sigma_ii sigma_jj rho_ij / alpha_ij^{2 nu} = C sigma'_ii sigma'_jj rho'_ij / beta_ij^{1 + 2 kappa}.
CompatReport matern_gw_compatible(const BivMatern& th0, const BivGW& la1, int d, double tol);

/// Dispatches on the kinds; a Wendland/Matern pair is checked in Matern/Wendland order.
CompatReport compatible(const BivModel& m0, const BivModel& m1, int d, double tol);

struct GwRanges {
  double beta11 = 0.0;
  double beta22 = 0.0;
  double beta12 = 0.0;
};

/// Wendland ranges making (th0, lambda) compatible for the given kappa, mu,
/// standard deviations and colocated correlation of the Wendland model.
/// Requires nu = kappa + 1/2 and mu > d + 1/2 + kappa (DomainError
/// otherwise) and the rho products of both models to share a sign.
GwRanges gw_ranges_from_matern(const BivMatern& th0, double kappa, double mu, double sigma11,
                               double sigma22, double rho12, int d);

/// The full compatible Wendland model.
BivGW derive_gw(const BivMatern& th0, double kappa, double mu, double sigma11, double sigma22,
                double rho12, int d);

enum class TailVerdict { identical, integrable, not_integrable };

const char* to_string(TailVerdict verdict);

struct TailDiagnostic {
  double slope = 0.0;  // log-log slope of g
  TailVerdict verdict = TailVerdict::identical;
  double z_min = 0.0;
  double z_max = 0.0;
  int points = 0;
};

/// g(z) = (1+z)^{2(2 nu + d)} ||F0(z) - F1(z)||_2^2 with nu the Matern-scale
/// smoothness of model0, fitted by least squares in log-log coordinates on a
/// logarithmic grid over [z_min, z_max]. "integrable" iff slope < -d - 0.1.
/// A heuristic diagnostic, not a proof of equivalence.
TailDiagnostic theorem2_tail_diagnostic(const BivModel& model0, const BivModel& model1, int d,
                                        double z_min, double z_max, int points = 41);

/// Same, over [10, 1000] / (smallest range of either model).
TailDiagnostic theorem2_tail_diagnostic(const BivModel& model0, const BivModel& model1, int d);

}  // namespace cokrig
