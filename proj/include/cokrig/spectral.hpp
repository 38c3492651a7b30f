#pragma once

// Isotropic spectral densities of the Matern and Generalized Wendland
// families, a direct Hankel-transform evaluation of an arbitrary radial
// covariance, and the 2x2 spectral matrices of the bivariate models.
//
// Convention: phi_hat(z) = (2 pi)^{-d/2} z^{1-d/2} int_0^inf u^{d/2} J_{d/2-1}(u z) phi(u) du,
// i.e. (2 pi)^{-d} times the d-dimensional Fourier transform of phi(|x|).

#include <functional>

#include "cokrig/covmodels.hpp"

namespace cokrig {

struct SpectralValue {
  double z = 0.0;      // radial frequency
  double value = 0.0;  // density
};

double matern_sdf(double z, const MaternParams& p, int d);

/// L(d, mu, kappa), the z = 0 value of the Wendland density for beta = 1.
double gw_sdf_constant(int d, double mu, double kappa);

enum class GwSdfBranch { series, asymptotic, extended_series, hankel };

const char* to_string(GwSdfBranch branch);

struct GwSdfValue {
  double value = 0.0;
  GwSdfBranch branch = GwSdfBranch::series;
};

/// L beta^d 1F2(zeta; zeta + mu/2, zeta + mu/2 + 1/2; -(z beta)^2 / 4),
/// zeta = (d+1)/2 + kappa. The hypergeometric factor comes from its power
/// series, its large-argument expansion, or the series in extended
/// precision; when none reaches 1e-10 relative accuracy the Hankel
/// quadrature is used instead.
GwSdfValue gw_sdf_detailed(double z, const GWParams& p, int d);

inline double gw_sdf(double z, const GWParams& p, int d) { return gw_sdf_detailed(z, p, d).value; }

using RadialFunction = std::function<double(double)>;

/// Direct Hankel transform of phi truncated at r_max, by 64-point
/// Gauss-Legendre on panels of width at most pi / max(z, 1) (and at most
/// r_max / 32). Throws TruncationError when |phi(r_max)| > 1e-12.
/// phi must be safe to call concurrently if the caller is concurrent.
double hankel_sdf_oracle(const RadialFunction& phi, double z, int d, double r_max);

/// Hankel transform of the Matern correlation truncated at alpha (2 nu + 60).
double matern_hankel_sdf(double z, const MaternParams& p, int d);

/// Hankel transform of the Wendland correlation over its support, with the
/// correlation itself integrated to 1e-14.
double gw_hankel_sdf(double z, const GWParams& p, int d);

Matrix2 biv_sdf_matrix(double z, const BivMatern& th, int d);
Matrix2 biv_sdf_matrix(double z, const BivGW& la, int d);
Matrix2 biv_sdf_matrix(double z, const BivModel& model, int d);

}  // namespace cokrig
