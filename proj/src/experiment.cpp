#include "invdens/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <thread>

#include "invdens/csv.hpp"
#include "invdens/error.hpp"
#include "invdens/hyperparams.hpp"
#include "invdens/rng.hpp"

namespace invdens {

namespace {

void maybe_timestamp(std::ostream& out, bool timestamp) {
  if (timestamp) out << timestamp_line() << '\n';
}

std::string fmt(double v) { return format_shortest(v); }

/// Bandwidth for one sample and point: plug-in policies ignore the data.
std::vector<double> bandwidth_for(const ExperimentConfig& cfg, const PreaveragedSample& sample,
                                  const Kernel1D& base, const DebiasWeights& weights,
                                  std::span<const double> x) {
  if (cfg.bandwidth.kind != BandwidthPolicy::Kind::kGl) {
    return resolve_bandwidth(cfg, sample.scheme, sample.block_size);
  }
  const auto grid = build_grid(sample.count(), sample.scheme.horizon(), sample.dim());
  GLOptions options;
  options.omega_bar = cfg.bandwidth.omega_bar;
  options.use_nu = cfg.bandwidth.use_nu;
  return gl_select(sample, grid, base, weights, x, options).h_star();
}

double target_at(const DiffusionModel& model, std::span<const double> x) {
  if (!model.has_density()) throw ConfigError("model has no analytic density for the bias");
  return model.density(x);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::uint64_t replication_seed(const ExperimentConfig& cfg, std::size_t index) {
  return derive_seed(cfg.seed, cfg.common_stream ? 0 : index);
}

} // namespace

std::size_t resolve_workers(std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested < 1) throw ParameterError("worker count must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<double>> run_indexed(
    std::size_t count, std::size_t workers,
    const std::function<std::vector<double>(std::size_t)>& f) {
  std::vector<std::vector<double>> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (k == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < k; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ObservationSeries simulate_replication(const ExperimentConfig& cfg, const DiffusionModel& model,
                                       std::size_t index) {
  ObservationScheme scheme = cfg.scheme;
  scheme.seed = replication_seed(cfg, index);
  const double tau = scheme.tau;
  scheme.tau = 0.0;
  ObservationSeries latent;
  if (cfg.simulation.method == SimulationSpec::Method::kExact) {
    const auto theta = model.ou_theta();
    if (!theta) throw ConfigError("exact simulation needs an OU model");
    latent = simulate_ou_exact(*theta, model.dim(), scheme);
  } else {
    latent = simulate_euler(model, scheme, cfg.simulation.substeps);
  }
  return add_noise(latent, tau, scheme.seed);
}

std::size_t resolve_block_size(const ExperimentConfig& cfg) { return resolve_block_size(cfg, cfg.scheme); }

std::size_t resolve_block_size(const ExperimentConfig& cfg, const ObservationScheme& scheme) {
  switch (cfg.block_size.kind) {
  case BlockSizePolicy::Kind::kFixed: return cfg.block_size.value;
  case BlockSizePolicy::Kind::kNumeric:
    return choose_p(scheme.tau, scheme.delta, summarize(cfg.alpha()).alpha1(), PMode::kNumeric);
  case BlockSizePolicy::Kind::kDebias:
    return choose_p(scheme.tau, scheme.delta, summarize(cfg.alpha()).alpha1(), PMode::kDebias);
  }
  throw ConfigError("unknown block size policy");
}

std::vector<double> resolve_bandwidth(const ExperimentConfig& cfg, const ObservationScheme& scheme,
                                      std::size_t p) {
  switch (cfg.bandwidth.kind) {
  case BandwidthPolicy::Kind::kFixed: return cfg.bandwidth.values;
  case BandwidthPolicy::Kind::kStar:
    return bandwidth_star(summarize(cfg.alpha()), scheme.n, scheme.delta, p, cfg.bandwidth.star);
  case BandwidthPolicy::Kind::kHorizon:
    return bandwidth_horizon(scheme.n, scheme.delta, cfg.model.dim, cfg.bandwidth.exponent);
  case BandwidthPolicy::Kind::kGl: break;
  }
  throw ConfigError("the gl bandwidth depends on the data");
}

double evaluate_estimator(EstimatorKind kind, const ObservationSeries& series,
                          const PreaveragedSample& sample, const ProductKernel& kernel,
                          const DebiasWeights& weights, std::span<const double> x) {
  switch (kind) {
  case EstimatorKind::kNaive: return naive_kb(series, kernel, x).value;
  case EstimatorKind::kPreaveraged: return nu_hat(sample, kernel, x).value;
  case EstimatorKind::kDebiased: return mu_hat(sample, kernel, weights, x).value;
  }
  throw ParameterError("unknown estimator kind");
}

PointStats point_stats(const std::vector<double>& values, double target) {
  PointStats s;
  s.target = target;
  s.count = values.size();
  if (values.empty()) return s;
  const auto r = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / r;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double c = v - s.mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  s.variance = m2 / r;
  m4 /= r;
  s.bias = s.mean - target;
  s.mse = s.bias * s.bias + s.variance;
  s.se_bias = std::sqrt(s.variance / r);
  s.se_variance = std::sqrt(std::max(0.0, m4 - s.variance * s.variance) / r);
  double sq_mean = 0.0;
  for (double v : values) sq_mean += (v - target) * (v - target);
  sq_mean /= r;
  double sq_var = 0.0;
  for (double v : values) {
    const double e = (v - target) * (v - target) - sq_mean;
    sq_var += e * e;
  }
  s.se_mse = std::sqrt(sq_var / r / r);
  return s;
}

std::size_t drop_non_finite(std::vector<std::vector<double>>& rows) {
  const std::size_t before = rows.size();
  std::erase_if(rows, [](const std::vector<double>& r) {
    return std::any_of(r.begin(), r.end(), [](double v) { return !std::isfinite(v); });
  });
  const std::size_t dropped = before - rows.size();
  if (static_cast<double>(dropped) > 0.01 * static_cast<double>(before)) {
    throw NumericalError("more than 1% of replications produced non-finite estimates");
  }
  return dropped;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);
  const std::size_t p = resolve_block_size(cfg);
  if (p > cfg.scheme.n) throw ConfigError("block size exceeds the number of observations");

  ExperimentResult result;
  result.points = cfg.eval_points;
  result.block_size = p;
  result.tau_tilde = effective_noise(cfg.scheme.tau, cfg.scheme.delta, p);
  if (cfg.bandwidth.kind != BandwidthPolicy::Kind::kGl) {
    result.bandwidths = resolve_bandwidth(cfg, cfg.scheme, p);
  }

  auto rows = run_indexed(cfg.replications, options.workers, [&](std::size_t r) {
    const auto series = simulate_replication(cfg, model, r);
    const auto sample = preaverage(series, p);
    std::vector<double> out;
    for (const auto& x : cfg.eval_points) {
      const ProductKernel kernel(base, bandwidth_for(cfg, sample, base, weights, x));
      out.push_back(evaluate_estimator(cfg.estimator.kind, series, sample, kernel, weights, x));
    }
    return out;
  });
  result.flagged = drop_non_finite(rows);
  for (std::size_t c = 0; c < cfg.eval_points.size(); ++c) {
    result.stats.push_back(point_stats(column(rows, c), target_at(model, cfg.eval_points[c])));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result, bool timestamp) {
  maybe_timestamp(out, timestamp);
  const std::size_t d = result.points.empty() ? 0 : result.points.front().size();
  for (std::size_t i = 0; i < d; ++i) out << "x_" << (i + 1) << ',';
  out << "mean,target,bias,variance,mse,se_bias,se_variance,se_mse\n";
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    for (double v : result.points[k]) out << fmt(v) << ',';
    const auto& s = result.stats[k];
    out << fmt(s.mean) << ',' << fmt(s.target) << ',' << fmt(s.bias) << ',' << fmt(s.variance) << ','
        << fmt(s.mse) << ',' << fmt(s.se_bias) << ',' << fmt(s.se_variance) << ',' << fmt(s.se_mse)
        << '\n';
  }
}

Table1Result reproduce_table1(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (cfg.bandwidth.kind == BandwidthPolicy::Kind::kGl) throw ConfigError("table1 needs a plug-in bandwidth");
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);
  Table1Result result;
  result.block_size = resolve_block_size(cfg);
  result.bandwidths = resolve_bandwidth(cfg, cfg.scheme, result.block_size);
  const ProductKernel kernel(base, result.bandwidths);

  auto rows = run_indexed(cfg.replications, options.workers, [&](std::size_t r) {
    const auto series = simulate_replication(cfg, model, r);
    const auto sample = preaverage(series, result.block_size);
    std::vector<double> out;
    for (const auto& x : cfg.eval_points) {
      out.push_back(nu_hat(sample, kernel, x).value);
      out.push_back(mu_hat(sample, kernel, weights, x).value);
    }
    return out;
  });
  drop_non_finite(rows);
  for (std::size_t k = 0; k < cfg.eval_points.size(); ++k) {
    const auto& x = cfg.eval_points[k];
    const double t = target_at(model, x);
    result.rows.push_back({"nu_hat", x, point_stats(column(rows, 2 * k), t)});
    result.rows.push_back({"mu_hat", x, point_stats(column(rows, 2 * k + 1), t)});
  }
  return result;
}

void write_table1_csv(std::ostream& out, const Table1Result& result, bool timestamp) {
  maybe_timestamp(out, timestamp);
  const std::size_t d = result.rows.empty() ? 0 : result.rows.front().x.size();
  out << "estimator,";
  for (std::size_t i = 0; i < d; ++i) out << "x_" << (i + 1) << ',';
  out << "error,bias,variance,se_error,se_bias,se_variance\n";
  for (const auto& row : result.rows) {
    out << row.estimator << ',';
    for (double v : row.x) out << fmt(v) << ',';
    const auto& s = row.stats;
    out << fmt(s.mse) << ',' << fmt(s.bias) << ',' << fmt(s.variance) << ',' << fmt(s.se_mse) << ','
        << fmt(s.se_bias) << ',' << fmt(s.se_variance) << '\n';
  }
}

Table2Result reproduce_table2(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (cfg.model.dim != 1) throw ConfigError("table2 is defined for d = 1");
  if (cfg.bandwidth.kind == BandwidthPolicy::Kind::kGl) throw ConfigError("table2 needs a plug-in bandwidth");
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);

  Table2Result result;
  result.points = cfg.table2.points;
  result.p_star = choose_p(cfg.scheme.tau, cfg.scheme.delta, summarize(cfg.alpha()).alpha1(), PMode::kNumeric);
  for (std::size_t p : cfg.table2.block_sizes) {
    const std::size_t q = p == 0 ? result.p_star : p;
    if (q > cfg.scheme.n) throw ConfigError("table2 block size exceeds n");
    result.block_sizes.push_back(q);
  }
  std::vector<ProductKernel> kernels;
  for (std::size_t q : result.block_sizes) kernels.emplace_back(base, resolve_bandwidth(cfg, cfg.scheme, q));

  auto rows = run_indexed(cfg.replications, options.workers, [&](std::size_t r) {
    const auto series = simulate_replication(cfg, model, r);
    std::vector<double> out;
    for (std::size_t b = 0; b < result.block_sizes.size(); ++b) {
      const auto sample = preaverage(series, result.block_sizes[b]);
      for (double x : result.points) {
        const double xs[] = {x};
        out.push_back(evaluate_estimator(cfg.estimator.kind, series, sample, kernels[b], weights, xs));
      }
    }
    return out;
  });
  drop_non_finite(rows);
  const std::size_t m = result.points.size();
  for (std::size_t b = 0; b < result.block_sizes.size(); ++b) {
    std::vector<PointStats> row;
    for (std::size_t c = 0; c < m; ++c) {
      const double xs[] = {result.points[c]};
      row.push_back(point_stats(column(rows, b * m + c), target_at(model, xs)));
    }
    result.cells.push_back(std::move(row));
  }
  return result;
}

void write_table2_csv(std::ostream& out, const Table2Result& result, bool timestamp) {
  maybe_timestamp(out, timestamp);
  out << 'p';
  for (double x : result.points) out << ",x=" << fmt(x);
  for (double x : result.points) out << ",se(x=" << fmt(x) << ')';
  out << '\n';
  for (std::size_t b = 0; b < result.block_sizes.size(); ++b) {
    out << result.block_sizes[b];
    for (const auto& s : result.cells[b]) out << ',' << fmt(s.mse);
    for (const auto& s : result.cells[b]) out << ',' << fmt(s.se_mse);
    out << '\n';
  }
}

SurfaceResult density_surface(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.model.dim != 2) throw ConfigError("the density surface needs d = 2");
  if (cfg.bandwidth.kind == BandwidthPolicy::Kind::kGl) throw ConfigError("the surface needs a plug-in bandwidth");
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);

  SurfaceResult result;
  result.p_star = resolve_block_size(cfg);
  const auto series = simulate_replication(cfg, model, 0);
  const auto sample = preaverage(series, result.p_star);
  const ProductKernel k_naive(base, resolve_bandwidth(cfg, cfg.scheme, 1));
  const ProductKernel k_pre(base, resolve_bandwidth(cfg, cfg.scheme, result.p_star));
  const EstimatorKind kind =
      cfg.estimator.kind == EstimatorKind::kNaive ? EstimatorKind::kPreaveraged : cfg.estimator.kind;

  const auto& s = cfg.surface;
  const double step = (s.hi - s.lo) / static_cast<double>(s.count - 1);
  for (std::size_t i = 0; i < s.count; ++i) {
    for (std::size_t j = 0; j < s.count; ++j) {
      SurfaceRow row;
      row.x1 = s.lo + step * static_cast<double>(i);
      row.x2 = s.lo + step * static_cast<double>(j);
      const double x[] = {row.x1, row.x2};
      row.target = target_at(model, x);
      row.naive = naive_kb(series, k_naive, x).value;
      row.preavg = evaluate_estimator(kind, series, sample, k_pre, weights, x);
      result.msd_naive += (row.naive - row.target) * (row.naive - row.target);
      result.msd_preavg += (row.preavg - row.target) * (row.preavg - row.target);
      result.rows.push_back(row);
    }
  }
  result.msd_naive /= static_cast<double>(result.rows.size());
  result.msd_preavg /= static_cast<double>(result.rows.size());
  return result;
}

void write_surface_csv(std::ostream& out, const SurfaceResult& result, bool timestamp) {
  maybe_timestamp(out, timestamp);
  out << "x1,x2,target,naive,preavg\n";
  for (const auto& r : result.rows) {
    out << fmt(r.x1) << ',' << fmt(r.x2) << ',' << fmt(r.target) << ',' << fmt(r.naive) << ','
        << fmt(r.preavg) << '\n';
  }
}

void write_surface_gnuplot(std::ostream& out, const std::string& csv_name) {
  out << "set datafile separator ','\n"
      << "set terminal pngcairo size 1500,450\n"
      << "set output 'surface.png'\n"
      << "set view map\n"
      << "set size ratio -1\n"
      << "set xlabel 'x1'\n"
      << "set ylabel 'x2'\n"
      << "set dgrid3d\n"
      << "set multiplot layout 1,3\n"
      << "set title 'target'\n"
      << "splot '" << csv_name << "' every ::1 using 1:2:3 with pm3d notitle\n"
      << "set title 'naive (p = 1)'\n"
      << "splot '" << csv_name << "' every ::1 using 1:2:4 with pm3d notitle\n"
      << "set title 'pre-averaged (p = p*)'\n"
      << "splot '" << csv_name << "' every ::1 using 1:2:5 with pm3d notitle\n"
      << "unset multiplot\n";
}

RateFit rate_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("regression needs two or more pairs");
  const auto k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("log-log regression needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw ParameterError("regression needs distinct x values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
      ssr += e * e;
    }
    fit.slope_se = std::sqrt(ssr / (k - 2.0) / sxx);
  }
  return fit;
}

RatesResult rate_study(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);
  const auto regime = summarize(cfg.alpha());

  RatesResult result;
  std::vector<double> ns;
  std::vector<double> mses;
  std::vector<double> predicted;
  for (std::size_t level = 0; level < cfg.rates.n.size(); ++level) {
    ExperimentConfig c = cfg;
    c.scheme.n = cfg.rates.n[level];
    c.scheme.delta = cfg.rates.delta_scale *
                     std::pow(static_cast<double>(c.scheme.n), -cfg.rates.delta_exponent);
    c.seed = derive_seed(cfg.seed, level, 0x7a7e);
    RateRow row;
    row.n = c.scheme.n;
    row.delta = c.scheme.delta;
    row.block_size = resolve_block_size(c);
    if (c.bandwidth.kind != BandwidthPolicy::Kind::kGl) {
      row.bandwidths = resolve_bandwidth(c, c.scheme, row.block_size);
    }
    auto rows = run_indexed(c.replications, options.workers, [&](std::size_t r) {
      const auto series = simulate_replication(c, model, r);
      const auto sample = preaverage(series, row.block_size);
      std::vector<double> out;
      for (const auto& x : c.eval_points) {
        const ProductKernel kernel(base, bandwidth_for(c, sample, base, weights, x));
        out.push_back(evaluate_estimator(c.estimator.kind, series, sample, kernel, weights, x));
      }
      return out;
    });
    drop_non_finite(rows);
    double se2 = 0.0;
    for (std::size_t k = 0; k < c.eval_points.size(); ++k) {
      const auto s = point_stats(column(rows, k), target_at(model, c.eval_points[k]));
      row.mse += s.mse;
      se2 += s.se_mse * s.se_mse;
    }
    const auto m = static_cast<double>(c.eval_points.size());
    row.mse /= m;
    row.se_mse = std::sqrt(se2) / m;
    row.predicted = predicted_rate(regime, c.scheme.tau, c.scheme.delta, c.scheme.n, row.block_size,
                                   c.bandwidth.star);
    ns.push_back(static_cast<double>(row.n));
    mses.push_back(row.mse);
    predicted.push_back(row.predicted);
    result.rows.push_back(std::move(row));
  }
  result.fit = rate_regression(ns, mses);
  result.fit.theoretical_slope = rate_regression(ns, predicted).slope;
  return result;
}

void write_rates_csv(std::ostream& out, const RatesResult& result, bool timestamp) {
  maybe_timestamp(out, timestamp);
  const std::size_t d = result.rows.empty() ? 0 : result.rows.front().bandwidths.size();
  out << "n,delta,p";
  for (std::size_t i = 0; i < d; ++i) out << ",h_" << (i + 1);
  out << ",mse,se_mse,predicted_rate\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << fmt(r.delta) << ',' << r.block_size;
    for (double h : r.bandwidths) out << ',' << fmt(h);
    out << ',' << fmt(r.mse) << ',' << fmt(r.se_mse) << ',' << fmt(r.predicted) << '\n';
  }
}

void write_rate_fit_csv(std::ostream& out, const RateFit& fit, bool timestamp) {
  maybe_timestamp(out, timestamp);
  out << "slope,slope_se,intercept,theoretical_slope\n"
      << fmt(fit.slope) << ',' << fmt(fit.slope_se) << ',' << fmt(fit.intercept) << ','
      << fmt(fit.theoretical_slope) << '\n';
}

std::vector<EstimateRow> estimate_points(const ExperimentConfig& cfg, const ObservationSeries& series) {
  cfg.validate();
  if (series.dim() != cfg.model.dim) throw DimensionalityError("series dimension does not match the model");
  const auto model = cfg.model.build();
  const auto base = Kernel1D::legendre(cfg.estimator.kernel_order);
  const auto weights = debias_weights(cfg.estimator.debias_order);
  const std::size_t p = resolve_block_size(cfg, series.scheme);
  const auto sample = preaverage(series, p);
  std::vector<EstimateRow> rows;
  for (const auto& x : cfg.eval_points) {
    const ProductKernel kernel(base, bandwidth_for(cfg, sample, base, weights, x));
    EstimateRow row;
    row.x = x;
    row.nu = nu_hat(sample, kernel, x).value;
    row.mu = mu_hat(sample, kernel, weights, x).value;
    if (model.has_density()) row.target = model.density(x);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_estimate_csv(std::ostream& out, const std::vector<EstimateRow>& rows, bool timestamp) {
  maybe_timestamp(out, timestamp);
  const std::size_t d = rows.empty() ? 0 : rows.front().x.size();
  for (std::size_t i = 0; i < d; ++i) out << "x_" << (i + 1) << ',';
  out << "nu_hat,mu_hat,target\n";
  for (const auto& r : rows) {
    for (double v : r.x) out << fmt(v) << ',';
    out << fmt(r.nu) << ',' << fmt(r.mu) << ',' << (r.target ? fmt(*r.target) : std::string()) << '\n';
  }
}

} // namespace invdens
