#include "cokrig/cokrige.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <type_traits>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// C_ij(h) of one component pair, memoised by distance: grid designs repeat
// the same distances many times and the Wendland correlation is a quadrature.
class PairCovariance {
public:
  PairCovariance(const BivModel& model, int i, int j) {
    std::visit(
        [&](const auto& m) {
          scale_ = m.rho(i, j) * m.sigma(i) * m.sigma(j);
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, BivMatern>) {
            matern_ = m.component(i, j);
          } else {
            gw_ = m.component(i, j);
            support_ = gw_.beta;
          }
        },
        model);
    compact_ = std::holds_alternative<BivGW>(model);
  }

  // Distances are snapped to multiples of 2^-44 (about 6e-14) before the
  // lookup, so that distances equal up to rounding share one entry and the
  // matrix is a function of the site geometry only, not of site order.
  double operator()(double h) {
    const auto key = static_cast<std::int64_t>(std::llround(std::ldexp(h, 44)));
    if (key == 0) return scale_;
    const double snapped = std::ldexp(static_cast<double>(key), -44);
    if (compact_ && snapped >= support_) return 0.0;
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v =
        scale_ * (compact_ ? gen_wendland(snapped, gw_) : matern(snapped, matern_));
    cache_.emplace(key, v);
    return v;
  }

private:
  double scale_ = 0.0;
  bool compact_ = false;
  double support_ = 0.0;
  MaternParams matern_;
  GWParams gw_;
  std::unordered_map<std::int64_t, double> cache_;
};

// Index of the first nonpositive pivot of an unpivoted Cholesky sweep.
std::size_t failing_pivot(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double d = a(k, k) - l.row(k).head(k).squaredNorm();
    if (!(d > 0.0)) return static_cast<std::size_t>(k);
    d = std::sqrt(d);
    l(k, k) = d;
    for (Eigen::Index r = k + 1; r < n; ++r)
      l(r, k) = (a(r, k) - l.row(r).head(k).dot(l.row(k).head(k))) / d;
  }
  return static_cast<std::size_t>(n);
}

double condition_estimate(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// Cholesky factor of a; throws CholeskyError on a nonpositive pivot and
// reports a pivot below n eps max(diag a) as a tiny pivot.
Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& a, const std::string& what,
                                   bool& tiny_pivot) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite()) {
    const std::size_t pivot = failing_pivot(a);
    const double cond = condition_estimate(a);
    throw CholeskyError(what + " is not numerically positive definite (pivot " +
                            std::to_string(pivot) + ", condition estimate " +
                            std::to_string(cond) + ")",
                        pivot, cond);
  }
  const double min_pivot_sq = llt.matrixLLT().diagonal().array().square().minCoeff();
  const double threshold = static_cast<double>(a.rows()) * kEps * a.diagonal().maxCoeff();
  tiny_pivot = min_pivot_sq < threshold;
  return llt;
}

double sigma11_sq(const BivModel& m) {
  return std::visit([](const auto& p) { return p.sigma11 * p.sigma11; }, m);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Cholesky factor of the covariance of (Z1 at locs1, Z2 at locs2, Z1(s0)).
Eigen::MatrixXd extended_factor(const Design& design, const BivModel& model) {
  const Eigen::Index n = static_cast<Eigen::Index>(design.n1() + design.n2());
  Eigen::MatrixXd c(n + 1, n + 1);
  c.topLeftCorner(n, n) = assemble_joint_cov(design, model);
  const Eigen::VectorXd c0 = cross_cov_vector(design, model, 1);
  c.col(n).head(n) = c0;
  c.row(n).head(n) = c0.transpose();
  c(n, n) = sigma11_sq(model);
  bool tiny = false;
  return factor(c, "covariance of the sampled field", tiny).matrixL();
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void Design::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("design: dim must be 1 or 2");
  if (locs1.empty()) throw DomainError("design: no primary sites");
  const auto check_list = [this](std::vector<Point> pts, const char* name) {
    for (const Point& p : pts) {
      for (int k = 0; k < 2; ++k) {
        if (!(p[k] >= 0.0 && p[k] <= 1.0) || (k >= dim && p[k] != 0.0))
          throw DomainError(std::string("design: ") + name + " site outside [0,1]^dim");
      }
    }
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
      throw DomainError(std::string("design: ") + name + " sites are not pairwise distinct");
  };
  check_list(locs1, "primary");
  check_list(locs2, "secondary");
  check_list({s0}, "prediction");
}

std::vector<double> grid_1d(int n) {
  if (n < 2) throw DomainError("grid_1d: need at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = static_cast<double>(k) / (n - 1);
  return g;
}

std::vector<Point> grid_2d(int nx) {
  const std::vector<double> g = grid_1d(nx);
  std::vector<Point> pts;
  pts.reserve(g.size() * g.size());
  for (double x : g)
    for (double y : g) pts.push_back({x, y});
  return pts;
}

Design section6_design(int dim, int n, double factor) {
  if (dim != 1 && dim != 2) throw DomainError("section6_design: dim must be 1 or 2");
  if (factor != 1.0 && factor != 1.5 && factor != 3.0)
    throw DomainError("section6_design: secondary factor must be 1, 1.5 or 3");
  const double scaled = factor * n;
  if (scaled != std::floor(scaled))
    throw DomainError("section6_design: factor 1.5 needs an even base count");
  const int n2 = static_cast<int>(scaled);
  Design design;
  design.dim = dim;
  if (dim == 1) {
    for (double x : grid_1d(n)) design.locs1.push_back({x, 0.0});
    for (double x : grid_1d(n2)) design.locs2.push_back({x, 0.0});
    design.s0 = {0.5, 0.0};
  } else {
    design.locs1 = grid_2d(n);
    design.locs2 = grid_2d(n2);
    design.s0 = {0.5, 0.5};
  }
  return design;
}

Eigen::MatrixXd assemble_joint_cov(const Design& design, const BivModel& model) {
  const std::size_t n1 = design.n1();
  const std::size_t n = n1 + design.n2();
  const auto site = [&](std::size_t k) -> const Point& {
    return k < n1 ? design.locs1[k] : design.locs2[k - n1];
  };
  PairCovariance c11(model, 1, 1);
  PairCovariance c22(model, 2, 2);
  PairCovariance c12(model, 1, 2);
  Eigen::MatrixXd c(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = col; row < n; ++row) {
      const double h = distance(site(row), site(col));
      double v;
      if (row < n1)
        v = c11(h);
      else if (col >= n1)
        v = c22(h);
      else
        v = c12(h);
      const auto r = static_cast<Eigen::Index>(row);
      const auto k = static_cast<Eigen::Index>(col);
      c(r, k) = v;
      c(k, r) = v;
    }
  }
  return c;
}

Eigen::VectorXd cross_cov_vector(const Design& design, const BivModel& model, int target) {
  if (target != 1 && target != 2) throw DomainError("cross_cov_vector: target must be 1 or 2");
  PairCovariance with1(model, target, 1);
  PairCovariance with2(model, target, 2);
  const std::size_t n1 = design.n1();
  Eigen::VectorXd c(static_cast<Eigen::Index>(n1 + design.n2()));
  for (std::size_t k = 0; k < n1; ++k)
    c(static_cast<Eigen::Index>(k)) = with1(distance(design.s0, design.locs1[k]));
  for (std::size_t k = 0; k < design.n2(); ++k)
    c(static_cast<Eigen::Index>(n1 + k)) = with2(distance(design.s0, design.locs2[k]));
  return c;
}

PredictionReport predict(const Design& design, const BivModel& model_true,
                         const BivModel& model_mis) {
  design.validate();
  validate(model_true, design.dim);
  validate(model_mis, design.dim);
  const bool same = model_true == model_mis;

  PredictionReport rep;
  const auto flag = [&rep](const std::string& why) {
    rep.unstable = true;
    rep.instability_reasons.push_back(why);
  };

  const Eigen::MatrixXd c_true = assemble_joint_cov(design, model_true);
  const Eigen::VectorXd k_true = cross_cov_vector(design, model_true, 1);
  const double var_true = sigma11_sq(model_true);
  const double var_mis = sigma11_sq(model_mis);

  bool tiny = false;
  const auto llt_true = factor(c_true, "true-model covariance", tiny);
  if (tiny) flag("tiny Cholesky pivot (true model)");
  const Eigen::VectorXd w_true = llt_true.solve(k_true);
  rep.mspe_true_under_true = var_true - k_true.dot(w_true);

  if (same) {
    rep.weights.assign(w_true.data(), w_true.data() + w_true.size());
    rep.mspe_mis_under_true = rep.mspe_true_under_true;
    rep.mspe_mis_under_mis = rep.mspe_true_under_true;
  } else {
    const Eigen::MatrixXd c_mis = assemble_joint_cov(design, model_mis);
    const Eigen::VectorXd k_mis = cross_cov_vector(design, model_mis, 1);
    const auto llt_mis = factor(c_mis, "misspecified-model covariance", tiny);
    if (tiny) flag("tiny Cholesky pivot (misspecified model)");
    const Eigen::VectorXd w = llt_mis.solve(k_mis);
    rep.weights.assign(w.data(), w.data() + w.size());
    rep.mspe_mis_under_true = var_true - 2.0 * w.dot(k_true) + w.dot(c_true * w);
    rep.mspe_mis_under_mis = var_mis - k_mis.dot(w);
  }

  const auto n1 = static_cast<Eigen::Index>(design.n1());
  const auto llt_sk = factor(c_true.topLeftCorner(n1, n1), "primary-site covariance", tiny);
  if (tiny) flag("tiny Cholesky pivot (simple kriging)");
  const Eigen::VectorXd k1 = k_true.head(n1);
  rep.sk_mspe = var_true - k1.dot(llt_sk.solve(k1));

  rep.degenerate = std::find(design.locs1.begin(), design.locs1.end(), design.s0) !=
                   design.locs1.end();
  if (rep.degenerate) {
    // Interpolation: every error is exactly zero and the ratios are 1.
    rep.mspe_mis_under_true = rep.mspe_true_under_true = rep.mspe_mis_under_mis = 0.0;
    rep.sk_mspe = 0.0;
    return rep;
  }

  const double mspe_floor = -1e-12 * var_true;
  if (rep.mspe_mis_under_true < mspe_floor || rep.mspe_true_under_true < mspe_floor ||
      rep.mspe_mis_under_mis < mspe_floor || rep.sk_mspe < mspe_floor)
    flag("negative MSPE");
  rep.ratio_efficiency = same ? 1.0 : rep.mspe_mis_under_true / rep.mspe_true_under_true;
  rep.ratio_variance = same ? 1.0 : rep.mspe_mis_under_mis / rep.mspe_mis_under_true;
  rep.sk_over_ck = rep.sk_mspe / rep.mspe_true_under_true;
  if (!(rep.ratio_efficiency >= 1.0 - 1e-9)) flag("efficiency ratio below 1");
  return rep;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t task) {
  return seed ^ splitmix64(task);
}

Eigen::MatrixXd sample_field(const Design& design, const BivModel& model, int n_replicates,
                             std::uint64_t seed) {
  if (n_replicates < 1) throw DomainError("sample_field: need at least one replicate");
  design.validate();
  validate(model, design.dim);
  const Eigen::MatrixXd l = extended_factor(design, model);
  const Eigen::Index n = l.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd eps(n_replicates, n);
  for (Eigen::Index r = 0; r < n_replicates; ++r)
    for (Eigen::Index k = 0; k < n; ++k) eps(r, k) = normal(rng);
  return eps * l.transpose();
}

MspeEstimate empirical_mspe(const Eigen::MatrixXd& samples, const std::vector<double>& weights,
                            int target_index) {
  const auto m = static_cast<Eigen::Index>(weights.size());
  if (samples.rows() < 2) throw DomainError("empirical_mspe: need at least two replicates");
  if (m > samples.cols() || target_index < 0 || target_index >= samples.cols())
    throw DomainError("empirical_mspe: weights or target index do not fit the samples");
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), m);
  const Eigen::VectorXd err = samples.leftCols(m) * w - samples.col(target_index);
  const Eigen::ArrayXd sq = err.array().square();
  const double n = static_cast<double>(samples.rows());
  const double mean = sq.mean();
  const double var = (sq - mean).square().sum() / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

MspeEstimate monte_carlo_mspe(const Design& design, const BivModel& model_true,
                              const std::vector<double>& weights, int n_replicates,
                              std::uint64_t seed) {
  if (n_replicates < 2) throw DomainError("monte_carlo_mspe: need at least two replicates");
  design.validate();
  validate(model_true, design.dim);
  const Eigen::MatrixXd l = extended_factor(design, model_true);
  const Eigen::Index n = l.rows();
  if (static_cast<Eigen::Index>(weights.size()) != n - 1)
    throw DomainError("monte_carlo_mspe: weights do not match the design");
  // Prediction error of replicate L eps is (w, -1)^T L eps = v^T eps.
  Eigen::VectorXd w_ext(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) w_ext(k) = weights[static_cast<std::size_t>(k)];
  w_ext(n - 1) = -1.0;
  const Eigen::VectorXd v = l.transpose() * w_ext;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::ArrayXd sq(n_replicates);
  for (int r = 0; r < n_replicates; ++r) {
    double e = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) e += v(k) * normal(rng);
    sq(r) = e * e;
  }
  const double count = static_cast<double>(n_replicates);
  const double mean = sq.mean();
  const double var = (sq - mean).square().sum() / (count - 1.0);
  return {mean, std::sqrt(var / count)};
}

RatioRecord ratio_record(int dim, int n, double factor_, const BivModel& model_true,
                         const BivModel& model_mis, int monte_carlo, std::uint64_t seed,
                         std::uint64_t task) {
  RatioRecord rec;
  rec.dim = dim;
  rec.factor = factor_;
  rec.n1 = dim == 2 ? n * n : n;
  rec.grid_spacing = n > 1 ? 1.0 / (n - 1) : 0.0;
  try {
    const Design design = section6_design(dim, n, factor_);
    rec.n1 = static_cast<int>(design.n1());
    rec.n2 = static_cast<int>(design.n2());
    const PredictionReport rep = predict(design, model_true, model_mis);
    rec.ratio_efficiency = rep.ratio_efficiency;
    rec.ratio_variance = rep.ratio_variance;
    rec.sk_over_ck = rep.sk_over_ck;
    rec.unstable = rep.unstable;
    if (monte_carlo > 0) {
      try {
        const MspeEstimate mc =
            monte_carlo_mspe(design, model_true, rep.weights, monte_carlo, stream_seed(seed, task));
        rec.mc_mspe = mc.mean;
        rec.mc_se = mc.standard_error;
      } catch (const std::exception& e) {
        rec.error = std::string("monte carlo: ") + e.what();
      }
    }
  } catch (const std::exception& e) {
    rec.unstable = true;
    rec.ratio_efficiency.reset();
    rec.ratio_variance.reset();
    rec.sk_over_ck.reset();
    rec.error = e.what();
  }
  return rec;
}

}  // namespace cokrig
