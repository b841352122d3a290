#include "invdens/invdens.h"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "invdens/adaptive.hpp"
#include "invdens/config.hpp"
#include "invdens/csv.hpp"
#include "invdens/diffusion.hpp"
#include "invdens/error.hpp"
#include "invdens/estimator.hpp"
#include "invdens/experiment.hpp"
#include "invdens/hyperparams.hpp"
#include "invdens/kernels.hpp"
#include "invdens/preaverage.hpp"

struct invdens_series {
  invdens::ObservationSeries value;
};

struct invdens_sample {
  invdens::PreaveragedSample value;
};

struct invdens_kernel {
  invdens::ProductKernel value;
};

struct invdens_weights {
  invdens::DebiasWeights value;
};

namespace {

thread_local std::string last_error;

invdens_status fail(invdens_status code, const std::string& message) {
  last_error = message;
  return code;
}

template <typename F>
invdens_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return INVDENS_OK;
  } catch (const invdens::Error& e) {
    return fail(static_cast<invdens_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(INVDENS_E_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return fail(INVDENS_E_UNKNOWN, e.what());
  } catch (...) {
    return fail(INVDENS_E_UNKNOWN, "unknown failure");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw invdens::ParameterError(std::string(what) + " is null");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invdens::IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw invdens::IoError("failed writing " + path.string());
}

invdens::PMode to_mode(int mode) {
  if (mode == 0) return invdens::PMode::kNumeric;
  if (mode == 1) return invdens::PMode::kDebias;
  throw invdens::ParameterError("mode must be 0 (numeric) or 1 (debias)");
}

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + invdens::format_shortest(v[i]);
  return s + "]";
}

} // namespace

#define INVDENS_CHECK_HANDLE(h)                                                                    \
  do {                                                                                             \
    if ((h) == nullptr) return fail(INVDENS_E_INVALID_HANDLE, #h " is null");                      \
  } while (false)

extern "C" {

const char* invdens_version(void) { return "0.1.0"; }

const char* invdens_last_error(void) { return last_error.c_str(); }

const char* invdens_status_name(invdens_status status) {
  switch (status) {
  case INVDENS_OK: return "ok";
  case INVDENS_E_PARAMETER: return "parameter error";
  case INVDENS_E_NUMERICAL: return "numerical error";
  case INVDENS_E_UNSUPPORTED: return "unsupported";
  case INVDENS_E_CONFIG: return "config error";
  case INVDENS_E_DIMENSIONALITY: return "dimensionality error";
  case INVDENS_E_SIMULATION: return "simulation error";
  case INVDENS_E_IO: return "io error";
  case INVDENS_E_INVALID_HANDLE: return "invalid handle";
  case INVDENS_E_UNKNOWN: return "unknown error";
  }
  return "unknown error";
}

void invdens_string_free(char* text) { delete[] text; }

invdens_status invdens_simulate_ou(double theta, size_t dim, const invdens_scheme* scheme,
                                   invdens_series** out) {
  return guarded([&] {
    require(scheme, "scheme");
    require(out, "out");
    invdens::ObservationScheme s{scheme->n, scheme->delta, 0.0, scheme->seed};
    auto latent = invdens::simulate_ou_exact(theta, dim, s);
    *out = new invdens_series{invdens::add_noise(latent, scheme->tau, scheme->seed)};
  });
}

invdens_status invdens_simulate_config(const char* config_json, size_t index, invdens_series** out) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out, "out");
    const auto cfg = invdens::parse_config(config_json);
    *out = new invdens_series{invdens::simulate_replication(cfg, cfg.model.build(), index)};
  });
}

invdens_status invdens_add_noise(const invdens_series* latent, double tau, uint64_t seed,
                                 invdens_series** out) {
  INVDENS_CHECK_HANDLE(latent);
  return guarded([&] {
    require(out, "out");
    *out = new invdens_series{invdens::add_noise(latent->value, tau, seed)};
  });
}

invdens_status invdens_series_read_csv(const char* path, double tau, invdens_series** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path);
    if (!in) throw invdens::IoError(std::string("cannot open ") + path);
    *out = new invdens_series{invdens::read_series_csv(in, tau)};
  });
}

invdens_status invdens_series_write_csv(const invdens_series* series, const char* path) {
  INVDENS_CHECK_HANDLE(series);
  return guarded([&] {
    require(path, "path");
    auto out = open_out(path);
    invdens::write_series_csv(series->value, out);
    close_out(out, path);
  });
}

invdens_status invdens_series_info(const invdens_series* series, size_t* n, size_t* dim,
                                   double* delta, double* tau) {
  INVDENS_CHECK_HANDLE(series);
  const auto& s = series->value;
  if (n) *n = s.scheme.n;
  if (dim) *dim = s.dim();
  if (delta) *delta = s.scheme.delta;
  if (tau) *tau = s.scheme.tau;
  return INVDENS_OK;
}

invdens_status invdens_series_observed(const invdens_series* series, double* buffer, size_t length) {
  INVDENS_CHECK_HANDLE(series);
  return guarded([&] {
    require(buffer, "buffer");
    const auto& obs = series->value.observed;
    const std::size_t total = obs.size() * obs.dim();
    if (length < total) throw invdens::ParameterError("buffer is too small");
    std::memcpy(buffer, obs.data().data(), total * sizeof(double));
  });
}

void invdens_series_free(invdens_series* series) { delete series; }

invdens_status invdens_preaverage(const invdens_series* series, size_t p, invdens_sample** out) {
  INVDENS_CHECK_HANDLE(series);
  return guarded([&] {
    require(out, "out");
    *out = new invdens_sample{invdens::preaverage(series->value, p)};
  });
}

invdens_status invdens_sample_info(const invdens_sample* sample, size_t* count, size_t* dim,
                                   double* tau_tilde) {
  INVDENS_CHECK_HANDLE(sample);
  if (count) *count = sample->value.count();
  if (dim) *dim = sample->value.dim();
  if (tau_tilde) *tau_tilde = sample->value.tau_tilde;
  return INVDENS_OK;
}

void invdens_sample_free(invdens_sample* sample) { delete sample; }

invdens_status invdens_effective_noise(double tau, double delta, size_t p, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = invdens::effective_noise(tau, delta, p);
  });
}

invdens_status invdens_kernel_create(int order, const double* bandwidths, size_t dim,
                                     invdens_kernel** out) {
  return guarded([&] {
    require(bandwidths, "bandwidths");
    require(out, "out");
    *out = new invdens_kernel{invdens::ProductKernel(invdens::Kernel1D::legendre(order),
                                                     std::vector<double>(bandwidths, bandwidths + dim))};
  });
}

invdens_status invdens_kernel_eval(const invdens_kernel* kernel, const double* y, double* out) {
  INVDENS_CHECK_HANDLE(kernel);
  return guarded([&] {
    require(y, "y");
    require(out, "out");
    *out = kernel->value(std::span<const double>(y, kernel->value.dim()));
  });
}

void invdens_kernel_free(invdens_kernel* kernel) { delete kernel; }

invdens_status invdens_weights_create(int order, invdens_weights** out) {
  return guarded([&] {
    require(out, "out");
    *out = new invdens_weights{invdens::debias_weights(order)};
  });
}

invdens_status invdens_weights_values(const invdens_weights* weights, double* u, size_t length) {
  INVDENS_CHECK_HANDLE(weights);
  return guarded([&] {
    require(u, "u");
    const auto& v = weights->value.values();
    if (length < v.size()) throw invdens::ParameterError("buffer is too small");
    std::copy(v.begin(), v.end(), u);
  });
}

invdens_status invdens_weights_determinant(const invdens_weights* weights, char** out) {
  INVDENS_CHECK_HANDLE(weights);
  return guarded([&] {
    require(out, "out");
    *out = copy_string(weights->value.determinant().str());
  });
}

void invdens_weights_free(invdens_weights* weights) { delete weights; }

invdens_status invdens_nu_hat(const invdens_sample* sample, const invdens_kernel* kernel,
                              const double* x, size_t dim, double* out) {
  INVDENS_CHECK_HANDLE(sample);
  INVDENS_CHECK_HANDLE(kernel);
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    *out = invdens::nu_hat(sample->value, kernel->value, std::span<const double>(x, dim)).value;
  });
}

invdens_status invdens_mu_hat(const invdens_sample* sample, const invdens_kernel* kernel,
                              const invdens_weights* weights, const double* x, size_t dim,
                              double* out) {
  INVDENS_CHECK_HANDLE(sample);
  INVDENS_CHECK_HANDLE(kernel);
  INVDENS_CHECK_HANDLE(weights);
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    *out = invdens::mu_hat(sample->value, kernel->value, weights->value,
                           std::span<const double>(x, dim))
               .value;
  });
}

invdens_status invdens_naive(const invdens_series* series, const invdens_kernel* kernel,
                             const double* x, size_t dim, double* out) {
  INVDENS_CHECK_HANDLE(series);
  INVDENS_CHECK_HANDLE(kernel);
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    *out = invdens::naive_kb(series->value, kernel->value, std::span<const double>(x, dim)).value;
  });
}

invdens_status invdens_choose_p(double tau, double delta, double alpha1, int mode, size_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = invdens::choose_p(tau, delta, alpha1, to_mode(mode));
  });
}

invdens_status invdens_plan(const double* alpha, size_t dim, size_t n, double delta, double tau,
                            int mode, char** out) {
  return guarded([&] {
    require(alpha, "alpha");
    require(out, "out");
    const auto regime = invdens::summarize(std::vector<double>(alpha, alpha + dim));
    *out = copy_string(invdens::to_key_value(invdens::make_plan(regime, tau, delta, n, to_mode(mode))));
  });
}

invdens_status invdens_plan_config(const char* config_json, char** out) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out, "out");
    const auto cfg = invdens::parse_config(config_json);
    const auto mode = cfg.block_size.kind == invdens::BlockSizePolicy::Kind::kDebias
                          ? invdens::PMode::kDebias
                          : invdens::PMode::kNumeric;
    const auto regime = invdens::summarize(cfg.alpha());
    const auto plan = invdens::make_plan(regime, cfg.scheme.tau, cfg.scheme.delta, cfg.scheme.n, mode,
                                         cfg.bandwidth.star);
    std::string text = invdens::to_key_value(plan);
    text += "d_class=" + invdens::to_string(regime.smoothness) + "\n";
    text += "alpha_bar=" + invdens::format_shortest(regime.alpha_bar) + "\n";
    if (regime.alpha_bar3) text += "alpha_bar3=" + invdens::format_shortest(*regime.alpha_bar3) + "\n";
    text += "tau_tilde=" +
            invdens::format_shortest(invdens::effective_noise(cfg.scheme.tau, cfg.scheme.delta, plan.p_star)) +
            "\n";
    *out = copy_string(text);
  });
}

invdens_status invdens_simulate_to_csv(const char* config_json, const char* out_csv) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out_csv, "out_csv");
    const auto cfg = invdens::parse_config(config_json);
    const auto series = invdens::simulate_replication(cfg, cfg.model.build(), 0);
    auto out = open_out(out_csv);
    invdens::write_series_csv(series, out);
    close_out(out, out_csv);
  });
}

invdens_status invdens_estimate(const char* config_json, const char* series_csv, const char* out_csv,
                                int timestamp) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out_csv, "out_csv");
    const auto cfg = invdens::parse_config(config_json);
    invdens::ObservationSeries series;
    if (series_csv != nullptr) {
      std::ifstream in(series_csv);
      if (!in) throw invdens::IoError(std::string("cannot open ") + series_csv);
      series = invdens::read_series_csv(in, cfg.scheme.tau);
    } else {
      series = invdens::simulate_replication(cfg, cfg.model.build(), 0);
    }
    const auto rows = invdens::estimate_points(cfg, series);
    auto out = open_out(out_csv);
    invdens::write_estimate_csv(out, rows, timestamp != 0);
    close_out(out, out_csv);
  });
}

invdens_status invdens_adapt(const char* config_json, const char* out_csv, int timestamp,
                             char** summary) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out_csv, "out_csv");
    const auto cfg = invdens::parse_config(config_json);
    const auto series = invdens::simulate_replication(cfg, cfg.model.build(), 0);
    const std::size_t p = invdens::resolve_block_size(cfg);
    const auto sample = invdens::preaverage(series, p);
    const auto grid = invdens::build_grid(sample.count(), cfg.scheme.horizon(), cfg.model.dim);
    invdens::GLOptions options;
    options.omega_bar = cfg.bandwidth.omega_bar;
    options.use_nu = cfg.bandwidth.use_nu;
    const auto state = invdens::gl_select(sample, grid, invdens::Kernel1D::legendre(cfg.estimator.kernel_order),
                                          invdens::debias_weights(cfg.estimator.debias_order),
                                          cfg.eval_points.front(), options);
    auto out = open_out(out_csv);
    if (timestamp != 0) out << invdens::timestamp_line() << '\n';
    invdens::write_gl_trace_csv(out, state);
    close_out(out, out_csv);
    if (summary != nullptr) {
      std::ostringstream s;
      s << "p=" << p << "\ngrid_size=" << grid.size() << "\nfloor=" << invdens::format_shortest(grid.floor)
        << "\nh_star=" << join(state.h_star()) << "\nestimate="
        << invdens::format_shortest(state.candidates[state.selected].estimate) << '\n';
      *summary = copy_string(s.str());
    }
  });
}

invdens_status invdens_bench_run(const char* kind, const char* config_json, const char* out_dir,
                                 const invdens_run_options* options, char** summary) {
  return guarded([&] {
    require(kind, "kind");
    require(config_json, "config_json");
    require(out_dir, "out_dir");
    const auto cfg = invdens::parse_config(config_json);
    invdens::RunOptions run;
    run.workers = invdens::resolve_workers(options && options->workers > 0
                                               ? std::optional<std::size_t>(options->workers)
                                               : std::nullopt);
    const bool stamp = options != nullptr && options->timestamp != 0;
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw invdens::IoError("cannot create " + dir.string());

    const auto start = std::chrono::steady_clock::now();
    std::ostringstream s;
    const std::string k(kind);
    if (k == "table1") {
      const auto result = invdens::reproduce_table1(cfg, run);
      auto out = open_out(dir / "table1.csv");
      invdens::write_table1_csv(out, result, stamp);
      close_out(out, dir / "table1.csv");
      s << "p=" << result.block_size << "\nh=" << join(result.bandwidths) << '\n';
      for (const auto& row : result.rows) {
        s << row.estimator << ": error=" << invdens::format_shortest(row.stats.mse)
          << " bias=" << invdens::format_shortest(row.stats.bias)
          << " variance=" << invdens::format_shortest(row.stats.variance) << '\n';
      }
    } else if (k == "table2") {
      const auto result = invdens::reproduce_table2(cfg, run);
      auto out = open_out(dir / "table2.csv");
      invdens::write_table2_csv(out, result, stamp);
      close_out(out, dir / "table2.csv");
      s << "p_star=" << result.p_star << '\n';
      for (std::size_t b = 0; b < result.block_sizes.size(); ++b) {
        s << "p=" << result.block_sizes[b] << ":";
        for (const auto& c : result.cells[b]) s << ' ' << invdens::format_shortest(c.mse);
        s << '\n';
      }
    } else if (k == "surface") {
      const auto result = invdens::density_surface(cfg);
      auto out = open_out(dir / "surface.csv");
      invdens::write_surface_csv(out, result, stamp);
      close_out(out, dir / "surface.csv");
      auto gp = open_out(dir / "surface.gp");
      invdens::write_surface_gnuplot(gp, "surface.csv");
      close_out(gp, dir / "surface.gp");
      s << "p_star=" << result.p_star << "\nmsd_naive=" << invdens::format_shortest(result.msd_naive)
        << "\nmsd_preavg=" << invdens::format_shortest(result.msd_preavg) << '\n';
    } else if (k == "rates") {
      const auto result = invdens::rate_study(cfg, run);
      auto out = open_out(dir / "rates.csv");
      invdens::write_rates_csv(out, result, stamp);
      close_out(out, dir / "rates.csv");
      auto fit = open_out(dir / "rates_fit.csv");
      invdens::write_rate_fit_csv(fit, result.fit, stamp);
      close_out(fit, dir / "rates_fit.csv");
      s << "slope=" << invdens::format_shortest(result.fit.slope)
        << "\nslope_se=" << invdens::format_shortest(result.fit.slope_se)
        << "\ntheoretical_slope=" << invdens::format_shortest(result.fit.theoretical_slope) << '\n';
    } else {
      throw invdens::ConfigError("unknown bench kind '" + k + "'");
    }
    s << "workers=" << run.workers << "\nwall_seconds="
      << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << '\n';
    if (summary != nullptr) *summary = copy_string(s.str());
  });
}

} // extern "C"
