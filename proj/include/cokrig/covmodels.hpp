#pragma once

// Univariate Matern / Generalized Wendland / Askey correlations, the
// bivariate 2x2 models built from them, and the bounds on the colocated
// correlation coefficient that keep those models positive definite.

#include <variant>

namespace cokrig {

struct MaternParams {
  double nu = 0.5;     // smoothness
  double alpha = 1.0;  // range

  void validate() const;
};

struct GWParams {
  double mu = 1.0;     // tail exponent
  double kappa = 0.0;  // smoothness; 0 selects the Askey function
  double beta = 1.0;   // support radius

  void validate() const;
  // Positive definiteness in R^d: mu >= (d+1)/2 + kappa.
  void validate_in_dimension(int d) const;
};

struct BivMatern {
  double sigma11 = 1.0;
  double sigma22 = 1.0;
  double rho12 = 0.0;
  double nu = 0.5;
  double alpha11 = 1.0;
  double alpha22 = 1.0;
  double alpha12 = 1.0;

  double sigma(int i) const { return i == 1 ? sigma11 : sigma22; }
  double rho(int i, int j) const { return i == j ? 1.0 : rho12; }
  double range(int i, int j) const {
    return i != j ? alpha12 : (i == 1 ? alpha11 : alpha22);
  }
  MaternParams component(int i, int j) const { return {nu, range(i, j)}; }

  bool operator==(const BivMatern&) const = default;
};

struct BivGW {
  double sigma11 = 1.0;
  double sigma22 = 1.0;
  double rho12 = 0.0;
  double mu = 1.0;
  double kappa = 0.0;
  double beta11 = 1.0;
  double beta22 = 1.0;
  double beta12 = 1.0;

  double sigma(int i) const { return i == 1 ? sigma11 : sigma22; }
  double rho(int i, int j) const { return i == j ? 1.0 : rho12; }
  double range(int i, int j) const { return i != j ? beta12 : (i == 1 ? beta11 : beta22); }
  GWParams component(int i, int j) const { return {mu, kappa, range(i, j)}; }

  bool operator==(const BivGW&) const = default;
};

using BivModel = std::variant<BivMatern, BivGW>;

/// 2x2 matrix value of a bivariate covariance or spectral density.
struct Matrix2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;

  double det() const { return m11 * m22 - m12 * m21; }
  // Largest absolute eigenvalue; assumes m12 == m21.
  double symmetric_spectral_norm() const;
};

double matern(double r, const MaternParams& p);

/// (1 - r/beta)_+^mu.
double askey(double r, double mu, double beta);

/// Generalized Wendland correlation. kappa = 0 is the Askey function;
/// kappa > 0 is evaluated by adaptive Gauss-Legendre quadrature with the
/// given absolute tolerance.
double gen_wendland(double r, const GWParams& p, double abs_tol = 1e-10);

Matrix2 biv_matern_cov(double h, const BivMatern& th);
Matrix2 biv_gw_cov(double h, const BivGW& la, double abs_tol = 1e-10);
Matrix2 biv_cov(double h, const BivModel& model);

struct InfimumOptions {
  int grid_points = 2001;
  double rel_tol = 1e-10;
};

/// Supremum of admissible |rho12| for the bivariate Matern with the given
/// ranges and smoothness in R^d. rho12 of th is ignored.
double biv_matern_rho_bound(const BivMatern& th, int d, const InfimumOptions& opt = {});

/// Same for the bivariate Generalized Wendland.
double biv_gw_rho_bound(const BivGW& la, int d, const InfimumOptions& opt = {});

double rho_bound(const BivModel& model, int d, const InfimumOptions& opt = {});

/// Parameter checks shared by every bivariate operation, without the
/// colocated-correlation bound: positivity, |rho12| < 1, and for the
/// Wendland family mu >= (d+1)/2 + kappa.
void validate_parameters(const BivMatern& th, int d);
void validate_parameters(const BivGW& la, int d);
void validate_parameters(const BivModel& model, int d);

/// Full validity: parameter checks plus |rho12| < bound - 1e-12.
void validate(const BivMatern& th, int d);
void validate(const BivGW& la, int d);
void validate(const BivModel& model, int d);

/// Smoothness on the Matern scale: nu, or kappa + 1/2 for the Wendland family.
double matern_equivalent_smoothness(const BivModel& model);

}  // namespace cokrig
