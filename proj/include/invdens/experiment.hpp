#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "invdens/adaptive.hpp"
#include "invdens/config.hpp"
#include "invdens/estimator.hpp"
#include "invdens/preaverage.hpp"

namespace invdens {

/// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "INVDENS_WORKERS";

/// Explicit value, else INVDENS_WORKERS, else the hardware concurrency.
std::size_t resolve_workers(std::optional<std::size_t> requested = std::nullopt);

struct RunOptions {
  std::size_t workers = 1;
};

/// Runs f(0..count-1) on a worker pool and returns the results in index order.
/// The first exception by index is rethrown.
std::vector<std::vector<double>> run_indexed(
    std::size_t count, std::size_t workers,
    const std::function<std::vector<double>(std::size_t)>& f);

/// Latent path plus measurement noise for replication `index`.
ObservationSeries simulate_replication(const ExperimentConfig& cfg, const DiffusionModel& model,
                                       std::size_t index);

std::size_t resolve_block_size(const ExperimentConfig& cfg);
std::size_t resolve_block_size(const ExperimentConfig& cfg, const ObservationScheme& scheme);
/// Bandwidths of the non-adaptive policies; throws ConfigError for the gl policy.
std::vector<double> resolve_bandwidth(const ExperimentConfig& cfg, const ObservationScheme& scheme,
                                      std::size_t p);

/// Estimator value of the configured kind.
double evaluate_estimator(EstimatorKind kind, const ObservationSeries& series,
                          const PreaveragedSample& sample, const ProductKernel& kernel,
                          const DebiasWeights& weights, std::span<const double> x);

struct PointStats {
  double mean = 0.0;
  double target = 0.0;
  double bias = 0.0;
  /// Population variance over replications.
  double variance = 0.0;
  /// bias^2 + variance.
  double mse = 0.0;
  double se_bias = 0.0;
  double se_variance = 0.0;
  double se_mse = 0.0;
  std::size_t count = 0;
};

PointStats point_stats(const std::vector<double>& values, double target);

/// Drops replications with any non-finite entry. Throws NumericalError when
/// more than 1% are dropped. Returns the number dropped.
std::size_t drop_non_finite(std::vector<std::vector<double>>& rows);

struct ExperimentResult {
  std::vector<Point> points;
  std::vector<PointStats> stats;
  std::size_t block_size = 1;
  /// Empty for the gl policy, whose bandwidth varies per replication.
  std::vector<double> bandwidths;
  double tau_tilde = 0.0;
  std::size_t flagged = 0;
  double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
void write_experiment_csv(std::ostream& out, const ExperimentResult& result, bool timestamp);

struct Table1Row {
  std::string estimator;
  Point x;
  PointStats stats;
};

struct Table1Result {
  std::vector<Table1Row> rows;
  std::size_t block_size = 1;
  std::vector<double> bandwidths;
};

/// Pre-averaged and debiased estimators on the same replications.
Table1Result reproduce_table1(const ExperimentConfig& cfg, const RunOptions& options = {});
void write_table1_csv(std::ostream& out, const Table1Result& result, bool timestamp);

struct Table2Result {
  std::vector<std::size_t> block_sizes;
  std::vector<double> points;
  /// cells[row][col], rows by block size.
  std::vector<std::vector<PointStats>> cells;
  std::size_t p_star = 1;
};

Table2Result reproduce_table2(const ExperimentConfig& cfg, const RunOptions& options = {});
void write_table2_csv(std::ostream& out, const Table2Result& result, bool timestamp);

struct SurfaceRow {
  double x1 = 0.0;
  double x2 = 0.0;
  double target = 0.0;
  double naive = 0.0;
  double preavg = 0.0;
};

struct SurfaceResult {
  std::vector<SurfaceRow> rows;
  std::size_t p_star = 1;
  double msd_naive = 0.0;
  double msd_preavg = 0.0;
};

/// One replication on a 2-D grid: no pre-averaging vs block size p*.
SurfaceResult density_surface(const ExperimentConfig& cfg);
void write_surface_csv(std::ostream& out, const SurfaceResult& result, bool timestamp);
/// gnuplot script drawing three heatmaps from `csv_name`.
void write_surface_gnuplot(std::ostream& out, const std::string& csv_name);

struct RateRow {
  std::size_t n = 0;
  double delta = 0.0;
  std::size_t block_size = 1;
  std::vector<double> bandwidths;
  double mse = 0.0;
  double se_mse = 0.0;
  double predicted = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  double theoretical_slope = 0.0;
};

/// Ordinary least squares of log(y) on log(x).
RateFit rate_regression(const std::vector<double>& x, const std::vector<double>& y);

struct RatesResult {
  std::vector<RateRow> rows;
  RateFit fit;
};

RatesResult rate_study(const ExperimentConfig& cfg, const RunOptions& options = {});
void write_rates_csv(std::ostream& out, const RatesResult& result, bool timestamp);
void write_rate_fit_csv(std::ostream& out, const RateFit& fit, bool timestamp);

struct EstimateRow {
  Point x;
  double nu = 0.0;
  double mu = 0.0;
  std::optional<double> target;
};

/// nu_hat and mu_hat at the configured points on one series.
std::vector<EstimateRow> estimate_points(const ExperimentConfig& cfg, const ObservationSeries& series);
void write_estimate_csv(std::ostream& out, const std::vector<EstimateRow>& rows, bool timestamp);

} // namespace invdens
