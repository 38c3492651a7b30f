#pragma once

// Command-line driver: study configuration, the convergence and range
// sweeps, CSV and SVG output, and the subcommand dispatcher.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cokrig/cokrige.hpp"
#include "cokrig/compat.hpp"

namespace cokrig::cli {

struct StudyConfig {
  int dim = 1;
  std::vector<int> counts;  // n1 values (dim 1) or nx values (dim 2)
  std::vector<double> secondary_factors{1.0};
  std::filesystem::path model_true;
  std::filesystem::path model_mis;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  int monte_carlo = 0;  // replicates; 0 disables the Monte Carlo columns
  std::vector<double> delta_list;

  /// Throws DomainError on a violated invariant.
  void validate() const;
};

std::vector<int> default_counts(int dim);
std::vector<double> default_delta_list();

/// Reads a JSON study configuration. Keys: dim, n1_list | nx_list,
/// secondary_factors, model_true, model_mis, seed, out, monte_carlo,
/// delta_list; model and output paths are relative to the config file.
/// Missing keys take their defaults; unknown keys are a ParseError.
StudyConfig load_study_config(const std::filesystem::path& path);

/// COKRIG_THREADS: unset, empty or 0 means serial.
int thread_count_from_env();

/// Runs fn(0..count-1) on up to `threads` workers (serial when <= 1).
template <class F>
void parallel_for(std::size_t count, int threads, const F& fn);

/// One record per (n, factor) cell, ascending in n then factor, whatever
/// the number of threads. Cell k draws from stream_seed(seed, k).
std::vector<RatioRecord> run_convergence(const StudyConfig& cfg, const BivModel& model_true,
                                         const BivModel& model_mis, int threads);

struct SweepRow {
  double delta = 0.0;
  std::optional<GwRanges> betas;  // empty when the shifted deviations are not positive
  RatioRecord record;
};

/// For each delta the Wendland deviations become (sigma11 + delta,
/// sigma22 - delta) of the base Wendland model, the ranges are re-derived
/// to stay compatible with the Matern model, and a convergence study runs.
std::vector<SweepRow> run_range_sweep(const StudyConfig& cfg, const BivMatern& model_true,
                                      const BivGW& base, int threads);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kConvergenceHeader =
    "dim,n1,n2,factor,grid_spacing,ratio_efficiency,ratio_variance,sk_over_ck,unstable,mc_mspe,"
    "mc_se";
inline constexpr const char* kRangeSweepHeader =
    "delta,beta11,beta22,beta12,dim,n1,n2,factor,grid_spacing,ratio_efficiency,ratio_variance,"
    "sk_over_ck,unstable,mc_mspe,mc_se";

std::string convergence_csv(const std::vector<RatioRecord>& records);
std::string range_sweep_csv(const std::vector<SweepRow>& rows);

/// SVG 1.1 of the natural logs of the three ratios against n1: one
/// polyline (class "series") per ratio and secondary factor (and delta,
/// for range-sweep files); unstable cells drawn in gray (class "unstable").
/// Throws ParseError when the CSV does not follow either schema.
std::string render_svg(const std::string& csv_text);

/// Entry point of the executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cokrig::cli

#include "cokrig/detail/parallel.hpp"
