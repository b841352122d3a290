#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invdens/invdens.h"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  std::string out = ".";
  bool no_timestamp = false;
};

int exit_code(invdens_status status) {
  switch (status) {
  case INVDENS_OK: return 0;
  case INVDENS_E_PARAMETER:
  case INVDENS_E_CONFIG:
  case INVDENS_E_DIMENSIONALITY:
  case INVDENS_E_UNSUPPORTED: return kExitConfig;
  case INVDENS_E_NUMERICAL:
  case INVDENS_E_SIMULATION: return kExitNumerical;
  default: return kExitOther;
  }
}

int report(invdens_status status) {
  if (status != INVDENS_OK) {
    std::cerr << "invdens: " << invdens_status_name(status) << ": " << invdens_last_error() << '\n';
  }
  return exit_code(status);
}

void print_and_free(char* text) {
  if (text != nullptr) {
    std::cout << text;
    invdens_string_free(text);
  }
}

/// Config file text with command-line overrides applied.
std::string config_text(const Globals& g) {
  nlohmann::json j = nlohmann::json::object();
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw std::runtime_error("cannot open config file " + g.config);
    j = nlohmann::json::parse(in);
  }
  if (g.seed) j["seed"] = *g.seed;
  return j.dump();
}

std::string out_path(const Globals& g, const std::string& name) {
  std::filesystem::create_directories(g.out);
  return (std::filesystem::path(g.out) / name).string();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant density estimation from noisy diffusion observations"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "Master seed, overrides the config");
  app.add_option("--workers", g.workers, "Worker threads (default: INVDENS_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generated-at line from CSV output");
  app.fallthrough();

  auto* simulate = app.add_subcommand("simulate", "Simulate one observation series to series.csv");
  auto* estimate = app.add_subcommand("estimate", "Evaluate nu_hat and mu_hat to estimate.csv");
  std::string series_csv;
  estimate->add_option("--series", series_csv, "Series CSV to read instead of simulating");
  auto* plan = app.add_subcommand("plan", "Print the closed-form hyperparameter plan");
  auto* adapt = app.add_subcommand("adapt", "Adaptive bandwidth selection, trace in gl_trace.csv");
  auto* bench = app.add_subcommand("bench", "Monte Carlo benches");
  std::string bench_kind;
  bench->add_option("kind", bench_kind, "table1, table2, surface or rates")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "surface", "rates"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  std::string cfg;
  try {
    cfg = config_text(g);
  } catch (const std::exception& e) {
    std::cerr << "invdens: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const int stamp = g.no_timestamp ? 0 : 1;
  try {
    if (simulate->parsed()) {
      return report(invdens_simulate_to_csv(cfg.c_str(), out_path(g, "series.csv").c_str()));
    }
    if (estimate->parsed()) {
      const char* series = series_csv.empty() ? nullptr : series_csv.c_str();
      return report(invdens_estimate(cfg.c_str(), series, out_path(g, "estimate.csv").c_str(), stamp));
    }
    if (plan->parsed()) {
      char* text = nullptr;
      const auto status = invdens_plan_config(cfg.c_str(), &text);
      print_and_free(text);
      return report(status);
    }
    if (adapt->parsed()) {
      char* text = nullptr;
      const auto status = invdens_adapt(cfg.c_str(), out_path(g, "gl_trace.csv").c_str(), stamp, &text);
      print_and_free(text);
      return report(status);
    }
    if (bench->parsed()) {
      invdens_run_options options{g.workers, stamp};
      char* text = nullptr;
      std::filesystem::create_directories(g.out);
      const auto status = invdens_bench_run(bench_kind.c_str(), cfg.c_str(), g.out.c_str(), &options, &text);
      print_and_free(text);
      return report(status);
    }
  } catch (const std::exception& e) {
    std::cerr << "invdens: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
