#pragma once

// Grid designs on [0,1]^d, joint covariance assembly for the bivariate
// models, simple cokriging of the first component under a possibly
// misspecified model, the exact mean squared prediction errors, and a
// Gaussian sampler to check those errors by simulation.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cokrig/covmodels.hpp"

namespace cokrig {

/// A site in [0,1]^dim; unused coordinates are 0.
using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b);

struct Design {
  int dim = 1;
  std::vector<Point> locs1;  // primary sites
  std::vector<Point> locs2;  // secondary sites
  Point s0{0.0, 0.0};        // prediction site (primary component)

  std::size_t n1() const { return locs1.size(); }
  std::size_t n2() const { return locs2.size(); }

  /// Throws DomainError unless dim is 1 or 2, coordinates lie in [0,1], the
  /// sites within each list are pairwise distinct and locs1 is nonempty.
  void validate() const;
};

/// (k-1)/(n-1), k = 1..n.
std::vector<double> grid_1d(int n);

/// Tensor product of grid_1d(nx) with itself, x varying slowest.
std::vector<Point> grid_2d(int nx);

/// Primary grid of n (dim 1) or n^2 (dim 2, n = nx) sites, a secondary grid
/// with factor times as many sites per axis, and prediction at the centre.
/// factor must be 1, 1.5 or 3 and factor * n an integer.
Design section6_design(int dim, int n, double factor);

/// (n1 + n2) x (n1 + n2) covariance of (Z1 at locs1, Z2 at locs2).
Eigen::MatrixXd assemble_joint_cov(const Design& design, const BivModel& model);

/// Covariances between Z_target(s0) and (Z1 at locs1, Z2 at locs2).
Eigen::VectorXd cross_cov_vector(const Design& design, const BivModel& model, int target);

struct PredictionReport {
  std::vector<double> weights;  // cokriging weights of the misspecified model
  double mspe_mis_under_true = 0.0;
  double mspe_true_under_true = 0.0;
  double mspe_mis_under_mis = 0.0;
  double ratio_efficiency = 1.0;  // mis_under_true / true_under_true
  double ratio_variance = 1.0;    // mis_under_mis / mis_under_true
  double sk_mspe = 0.0;           // simple kriging from the primary sites, true model
  double sk_over_ck = 1.0;        // sk_mspe / true_under_true
  bool unstable = false;
  bool degenerate = false;  // s0 is a primary site; ratios defined as 1
  std::vector<std::string> instability_reasons;
};

/// Cokriging of Z1(s0) with weights from model_mis, errors evaluated under
/// model_true. Throws CholeskyError when a covariance matrix is not
/// numerically positive definite.
PredictionReport predict(const Design& design, const BivModel& model_true,
                         const BivModel& model_mis);

/// Seed of the independent random stream of a task: seed XOR splitmix64(task).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t task);

/// Replicates x (n1 + n2 + 1): zero-mean Gaussian draws of
/// (Z1 at locs1, Z2 at locs2, Z1(s0)) under model. Deterministic in seed.
Eigen::MatrixXd sample_field(const Design& design, const BivModel& model, int n_replicates,
                             std::uint64_t seed);

struct MspeEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean of (w^T z - z_target)^2 over the rows of samples (w covers the
/// first weights.size() columns) and its standard error.
MspeEstimate empirical_mspe(const Eigen::MatrixXd& samples, const std::vector<double>& weights,
                            int target_index);

/// Same as empirical_mspe(sample_field(...), weights, n1 + n2) without
/// keeping the replicates in memory.
MspeEstimate monte_carlo_mspe(const Design& design, const BivModel& model_true,
                              const std::vector<double>& weights, int n_replicates,
                              std::uint64_t seed);

struct RatioRecord {
  int dim = 1;
  int n1 = 0;
  int n2 = 0;
  double factor = 1.0;
  double grid_spacing = 0.0;
  std::optional<double> ratio_efficiency;  // empty when the cell failed
  std::optional<double> ratio_variance;
  std::optional<double> sk_over_ck;
  bool unstable = false;
  std::optional<double> mc_mspe;
  std::optional<double> mc_se;
  std::string error;  // diagnostic of a failed cell
};

/// One cell of a convergence study: the design section6_design(dim, n,
/// factor), the prediction report, and optionally a Monte Carlo estimate of
/// the misspecified MSPE under the true model. Failures are recorded in the
/// record (unstable, ratios empty) instead of thrown.
RatioRecord ratio_record(int dim, int n, double factor, const BivModel& model_true,
                         const BivModel& model_mis, int monte_carlo, std::uint64_t seed,
                         std::uint64_t task);

}  // namespace cokrig
