#include "cokrig/compat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cokrig/errors.hpp"
#include "cokrig/specfun.hpp"
#include "cokrig/spectral.hpp"

namespace cokrig {

namespace {

constexpr std::array<std::array<int, 2>, 3> kPairs{{{1, 1}, {2, 2}, {1, 2}}};

// |a - b| relative to the smaller magnitude, so that a 10% change of one
// side reads as 0.1 whichever side moved. Both zero: 0; one zero: 1.
double relative_residual(double a, double b) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) return 0.0;
  const double lo = std::min(std::abs(a), std::abs(b));
  const double hi = std::max(std::abs(a), std::abs(b));
  return diff / (lo > 0.0 ? lo : hi);
}

bool differs(double a, double b) { return std::abs(a - b) > kHypothesisSlack; }

template <class M>
double scaled_cross(const M& m, int i, int j) {
  return m.sigma(i) * m.sigma(j) * m.rho(i, j);
}

void finish(CompatReport& report, double tol) {
  report.tolerance = tol;
  report.compatible =
      report.violations.empty() &&
      std::all_of(report.residuals.begin(), report.residuals.end(),
                  [tol](double r) { return r <= tol; });
}

void check_tol(double tol) {
  if (!(tol >= 0.0)) throw DomainError("compatibility tolerance must be nonnegative");
}

void check_mu(double mu, double kappa, int d, std::vector<std::string>& violations) {
  if (!(mu > d + 0.5 + kappa + kHypothesisSlack)) violations.emplace_back("mu too small");
}

}  // namespace

double CompatReport::residual(int i, int j) const {
  if (i == j) return residuals[i == 1 ? 0 : 1];
  return residuals[2];
}

double c_kappa_mu(double kappa, double mu) {
  if (!(mu > 0.0)) throw DomainError("c_kappa_mu: mu must be positive");
  if (!(kappa >= 0.0)) throw DomainError("c_kappa_mu: kappa must be nonnegative");
  const double log_c =
      std::log(mu) + specfun::ln_gamma(2.0 * kappa + mu + 1.0) - specfun::ln_gamma(mu + 1.0);
  if (log_c > std::log(std::numeric_limits<double>::max()))
    throw OverflowError("c_kappa_mu: value exceeds the double range", log_c);
  if (kappa == 0.0) return mu;
  return std::exp(log_c);
}

CompatReport matern_matern_compatible(const BivMatern& th0, const BivMatern& th1, int d,
                                      double tol) {
  check_tol(tol);
  validate_parameters(th0, d);
  validate_parameters(th1, d);
  CompatReport report;
  if (differs(th0.nu, th1.nu)) report.violations.emplace_back("nu mismatch");
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto [i, j] = kPairs[k];
    const double lhs = scaled_cross(th0, i, j) / std::pow(th0.range(i, j), 2.0 * th0.nu);
    const double rhs = scaled_cross(th1, i, j) / std::pow(th1.range(i, j), 2.0 * th0.nu);
    report.residuals[k] = relative_residual(lhs, rhs);
  }
  finish(report, tol);
  return report;
}

CompatReport gw_gw_compatible(const BivGW& la0, const BivGW& la1, int d, double tol) {
  check_tol(tol);
  validate_parameters(la0, d);
  validate_parameters(la1, d);
  CompatReport report;
  if (differs(la0.kappa, la1.kappa)) report.violations.emplace_back("kappa mismatch");
  if (differs(la0.mu, la1.mu)) report.violations.emplace_back("mu mismatch");
  check_mu(std::min(la0.mu, la1.mu), std::max(la0.kappa, la1.kappa), d, report.violations);
  const double power = 1.0 + 2.0 * la0.kappa;
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto [i, j] = kPairs[k];
    const double lhs = scaled_cross(la0, i, j) / std::pow(la0.range(i, j), power);
    const double rhs = scaled_cross(la1, i, j) / std::pow(la1.range(i, j), power);
    report.residuals[k] = relative_residual(lhs, rhs);
  }
  finish(report, tol);
  return report;
}

CompatReport matern_gw_compatible(const BivMatern& th0, const BivGW& la1, int d, double tol) {
  check_tol(tol);
  validate_parameters(th0, d);
  validate_parameters(la1, d);
  CompatReport report;
  if (differs(th0.nu, la1.kappa + 0.5)) report.violations.emplace_back("nu != kappa + 1/2");
  check_mu(la1.mu, la1.kappa, d, report.violations);
  if (th0.nu < 0.5 - kHypothesisSlack) report.violations.emplace_back("nu < 1/2");
  const double c = c_kappa_mu(la1.kappa, la1.mu);
  const double power = 1.0 + 2.0 * la1.kappa;
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto [i, j] = kPairs[k];
    const double lhs = scaled_cross(th0, i, j) / std::pow(th0.range(i, j), 2.0 * th0.nu);
    const double rhs = c * scaled_cross(la1, i, j) / std::pow(la1.range(i, j), power);
    report.residuals[k] = relative_residual(lhs, rhs);
  }
  finish(report, tol);
  return report;
}

CompatReport compatible(const BivModel& m0, const BivModel& m1, int d, double tol) {
  if (const auto* a = std::get_if<BivMatern>(&m0)) {
    if (const auto* b = std::get_if<BivMatern>(&m1)) return matern_matern_compatible(*a, *b, d, tol);
    return matern_gw_compatible(*a, std::get<BivGW>(m1), d, tol);
  }
  const auto& a = std::get<BivGW>(m0);
  if (const auto* b = std::get_if<BivGW>(&m1)) return gw_gw_compatible(a, *b, d, tol);
  return matern_gw_compatible(std::get<BivMatern>(m1), a, d, tol);
}

GwRanges gw_ranges_from_matern(const BivMatern& th0, double kappa, double mu, double sigma11,
                               double sigma22, double rho12, int d) {
  validate_parameters(th0, d);
  if (!(kappa >= 0.0)) throw DomainError("derive: kappa must be nonnegative");
  if (!(sigma11 > 0.0) || !(sigma22 > 0.0))
    throw DomainError("derive: standard deviations must be positive");
  if (!(std::abs(rho12) < 1.0)) throw DomainError("derive: |rho12| must be below 1");
  if (differs(th0.nu, kappa + 0.5))
    throw DomainError("derive: hypothesis violated: nu != kappa + 1/2");
  if (!(mu > d + 0.5 + kappa + kHypothesisSlack))
    throw DomainError("derive: hypothesis violated: mu too small (need mu > d + 1/2 + kappa)");

  const double c = c_kappa_mu(kappa, mu);
  const double inv_power = 1.0 / (1.0 + 2.0 * kappa);
  const BivGW sigmas{sigma11, sigma22, rho12, mu, kappa, 1.0, 1.0, 1.0};
  const auto solve = [&](int i, int j) {
    double s1 = scaled_cross(sigmas, i, j);
    double s0 = scaled_cross(th0, i, j);
    if (i != j && rho12 == 0.0 && th0.rho12 == 0.0) {
      // Both sides vanish for every beta12; keep the range implied by the
      // standard deviations alone.
      s1 = sigma11 * sigma22;
      s0 = th0.sigma11 * th0.sigma22;
    }
    const double ratio = s1 / s0;
    if (!(ratio > 0.0))
      throw DomainError(
          "derive: colocated correlations of opposite sign (or exactly one zero) admit no range");
    return std::pow(c * ratio * std::pow(th0.range(i, j), 2.0 * th0.nu), inv_power);
  };
  return {solve(1, 1), solve(2, 2), solve(1, 2)};
}

BivGW derive_gw(const BivMatern& th0, double kappa, double mu, double sigma11, double sigma22,
                double rho12, int d) {
  const GwRanges b = gw_ranges_from_matern(th0, kappa, mu, sigma11, sigma22, rho12, d);
  return {sigma11, sigma22, rho12, mu, kappa, b.beta11, b.beta22, b.beta12};
}

const char* to_string(TailVerdict verdict) {
  switch (verdict) {
    case TailVerdict::identical:
      return "identical";
    case TailVerdict::integrable:
      return "integrable";
    case TailVerdict::not_integrable:
      return "not integrable";
  }
  return "unknown";
}

TailDiagnostic theorem2_tail_diagnostic(const BivModel& model0, const BivModel& model1, int d,
                                        double z_min, double z_max, int points) {
  if (!(z_min > 0.0) || !(z_max >= 100.0 * z_min))
    throw DomainError("tail diagnostic: the frequency range must span at least two decades");
  if (points < 3) throw DomainError("tail diagnostic: need at least 3 frequencies");
  validate_parameters(model0, d);
  validate_parameters(model1, d);
  const double weight = 2.0 * (2.0 * matern_equivalent_smoothness(model0) + d);
  const double step = std::log(z_max / z_min) / (points - 1);

  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = 0; k < points; ++k) {
    const double z = z_min * std::exp(step * k);
    const Matrix2 f0 = biv_sdf_matrix(z, model0, d);
    const Matrix2 f1 = biv_sdf_matrix(z, model1, d);
    const Matrix2 diff{f0.m11 - f1.m11, f0.m12 - f1.m12, f0.m21 - f1.m21, f0.m22 - f1.m22};
    const double norm = diff.symmetric_spectral_norm();
    if (norm > 0.0) {
      xs.push_back(std::log(z));
      ys.push_back(weight * std::log1p(z) + 2.0 * std::log(norm));
    }
  }

  TailDiagnostic out;
  out.z_min = z_min;
  out.z_max = z_max;
  out.points = points;
  if (xs.size() < 2) return out;  // identical (g vanishes)
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  out.slope = sxy / sxx;
  out.verdict = out.slope < -d - 0.1 ? TailVerdict::integrable : TailVerdict::not_integrable;
  return out;
}

TailDiagnostic theorem2_tail_diagnostic(const BivModel& model0, const BivModel& model1, int d) {
  const auto smallest = [](const BivModel& m) {
    return std::visit(
        [](const auto& p) { return std::min({p.range(1, 1), p.range(2, 2), p.range(1, 2)}); }, m);
  };
  const double r = std::min(smallest(model0), smallest(model1));
  return theorem2_tail_diagnostic(model0, model1, d, 10.0 / r, 1000.0 / r);
}

}  // namespace cokrig
