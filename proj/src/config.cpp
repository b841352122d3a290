#include "invdens/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "invdens/error.hpp"

namespace invdens {

namespace {

using nlohmann::json;

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

std::string read_enum(const json& obj, const char* key, std::string fallback) {
  read(obj, key, fallback);
  return fallback;
}

[[noreturn]] void bad_choice(const char* key, const std::string& got) {
  throw ConfigError(std::string("unsupported ") + key + " '" + got + "'");
}

void parse_model(const json& j, ModelSpec& m) {
  allow_keys(j, "model", {"kind", "theta", "curvature", "dim"});
  const auto kind = read_enum(j, "kind", "ou");
  if (kind == "ou") {
    m.kind = ModelSpec::Kind::kOrnsteinUhlenbeck;
  } else if (kind == "log_cosh") {
    m.kind = ModelSpec::Kind::kLogCosh;
  } else {
    bad_choice("model kind", kind);
  }
  read(j, "theta", m.theta);
  read(j, "curvature", m.curvature);
  read(j, "dim", m.dim);
}

void parse_scheme(const json& j, ObservationScheme& s) {
  allow_keys(j, "scheme", {"n", "delta", "tau"});
  read(j, "n", s.n);
  read(j, "delta", s.delta);
  read(j, "tau", s.tau);
}

void parse_simulation(const json& j, SimulationSpec& s) {
  allow_keys(j, "simulation", {"method", "substeps"});
  const auto method = read_enum(j, "method", "exact");
  if (method == "exact") {
    s.method = SimulationSpec::Method::kExact;
  } else if (method == "euler") {
    s.method = SimulationSpec::Method::kEuler;
  } else {
    bad_choice("simulation method", method);
  }
  read(j, "substeps", s.substeps);
}

void parse_estimator(const json& j, EstimatorSpec& e) {
  allow_keys(j, "estimator", {"kind", "kernel_order", "debias_order"});
  const auto kind = read_enum(j, "kind", "preaveraged");
  if (kind == "naive") {
    e.kind = EstimatorKind::kNaive;
  } else if (kind == "preaveraged") {
    e.kind = EstimatorKind::kPreaveraged;
  } else if (kind == "debiased") {
    e.kind = EstimatorKind::kDebiased;
  } else {
    bad_choice("estimator kind", kind);
  }
  read(j, "kernel_order", e.kernel_order);
  read(j, "debias_order", e.debias_order);
}

void parse_block_size(const json& j, BlockSizePolicy& b) {
  allow_keys(j, "block_size", {"policy", "value"});
  const auto policy = read_enum(j, "policy", "numeric");
  if (policy == "fixed") {
    b.kind = BlockSizePolicy::Kind::kFixed;
    if (!j.contains("value")) throw ConfigError("fixed block size needs 'value'");
  } else if (policy == "numeric") {
    b.kind = BlockSizePolicy::Kind::kNumeric;
  } else if (policy == "debias") {
    b.kind = BlockSizePolicy::Kind::kDebias;
  } else {
    bad_choice("block size policy", policy);
  }
  read(j, "value", b.value);
}

void parse_bandwidth(const json& j, BandwidthPolicy& b) {
  allow_keys(j, "bandwidth",
             {"policy", "values", "exponent", "w_scale", "hf_exponent", "omega_bar", "use_nu"});
  const auto policy = read_enum(j, "policy", "star");
  if (policy == "fixed") {
    b.kind = BandwidthPolicy::Kind::kFixed;
    if (!j.contains("values")) throw ConfigError("fixed bandwidth needs 'values'");
  } else if (policy == "star") {
    b.kind = BandwidthPolicy::Kind::kStar;
  } else if (policy == "horizon") {
    b.kind = BandwidthPolicy::Kind::kHorizon;
  } else if (policy == "gl") {
    b.kind = BandwidthPolicy::Kind::kGl;
  } else {
    bad_choice("bandwidth policy", policy);
  }
  read(j, "values", b.values);
  read(j, "exponent", b.exponent);
  read(j, "w_scale", b.star.w_scale);
  const auto hf = read_enum(j, "hf_exponent", "consistent");
  if (hf == "consistent") {
    b.star.hf_exponent = HfExponent::kConsistent;
  } else if (hf == "as_printed") {
    b.star.hf_exponent = HfExponent::kAsPrinted;
  } else {
    bad_choice("hf_exponent", hf);
  }
  read(j, "omega_bar", b.omega_bar);
  read(j, "use_nu", b.use_nu);
}

std::vector<Point> parse_grid(const json& j, std::size_t dim) {
  allow_keys(j, "eval_grid", {"lo", "hi", "count"});
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;
  read(j, "lo", lo);
  read(j, "hi", hi);
  read(j, "count", count);
  if (count < 1 || !(hi >= lo)) throw ConfigError("eval_grid needs count >= 1 and hi >= lo");
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= count;
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    Point x(dim);
    std::size_t rest = k;
    for (std::size_t i = dim; i-- > 0;) {
      const std::size_t idx = rest % count;
      rest /= count;
      x[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(count - 1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

void parse_table2(const json& j, Table2Spec& t) {
  allow_keys(j, "table2", {"block_sizes", "points"});
  if (auto it = j.find("block_sizes"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("table2.block_sizes must be an array");
    t.block_sizes.clear();
    for (const auto& v : *it) {
      if (v.is_string() && v.get<std::string>() == "p*") {
        t.block_sizes.push_back(0);
      } else if (v.is_number_unsigned() && v.get<std::size_t>() > 0) {
        t.block_sizes.push_back(v.get<std::size_t>());
      } else {
        throw ConfigError("table2.block_sizes entries are positive integers or \"p*\"");
      }
    }
  }
  read(j, "points", t.points);
}

void parse_surface(const json& j, SurfaceSpec& s) {
  allow_keys(j, "surface", {"lo", "hi", "count"});
  read(j, "lo", s.lo);
  read(j, "hi", s.hi);
  read(j, "count", s.count);
}

void parse_rates(const json& j, RatesSpec& r) {
  allow_keys(j, "rates", {"n", "delta_scale", "delta_exponent"});
  read(j, "n", r.n);
  read(j, "delta_scale", r.delta_scale);
  read(j, "delta_exponent", r.delta_exponent);
}

} // namespace

DiffusionModel ModelSpec::build() const {
  switch (kind) {
  case Kind::kOrnsteinUhlenbeck: return DiffusionModel::ornstein_uhlenbeck(theta, dim);
  case Kind::kLogCosh: return DiffusionModel::log_cosh(curvature, dim);
  }
  throw ConfigError("unknown model kind");
}

std::vector<double> ExperimentConfig::alpha() const {
  if (holder_alpha.empty()) return std::vector<double>(model.dim, 2.0);
  return holder_alpha;
}

void ExperimentConfig::validate() const {
  const std::size_t d = model.dim;
  if (d < 1) throw ConfigError("model.dim must be at least 1");
  if (!(model.theta > 0.0)) throw ConfigError("model.theta must be positive");
  if (!(model.curvature > 0.0)) throw ConfigError("model.curvature must be positive");
  if (scheme.n < 1) throw ConfigError("scheme.n must be at least 1");
  if (!(scheme.delta > 0.0) || !std::isfinite(scheme.delta)) throw ConfigError("scheme.delta must be positive");
  if (!(scheme.tau >= 0.0) || !std::isfinite(scheme.tau)) throw ConfigError("scheme.tau must be non-negative");
  if (simulation.substeps < 1) throw ConfigError("simulation.substeps must be at least 1");
  if (simulation.method == SimulationSpec::Method::kExact &&
      model.kind != ModelSpec::Kind::kOrnsteinUhlenbeck) {
    throw ConfigError("exact simulation is only available for the OU model");
  }
  if (estimator.kernel_order < 1) throw ConfigError("estimator.kernel_order must be at least 1");
  if (estimator.debias_order < 1 || estimator.debias_order > DebiasWeights::kMaxOrder) {
    throw ConfigError("estimator.debias_order must lie in 1..12");
  }
  if (block_size.kind == BlockSizePolicy::Kind::kFixed && block_size.value < 1) {
    throw ConfigError("block_size.value must be at least 1");
  }
  if (bandwidth.kind == BandwidthPolicy::Kind::kFixed) {
    if (bandwidth.values.size() != d) throw ConfigError("bandwidth.values needs one entry per coordinate");
    for (double h : bandwidth.values) {
      if (!(h > 0.0)) throw ConfigError("bandwidths must be positive");
    }
  }
  if (bandwidth.kind == BandwidthPolicy::Kind::kGl && d < 3) {
    throw ConfigError("the gl bandwidth policy needs d >= 3");
  }
  if (!(bandwidth.omega_bar > 0.0)) throw ConfigError("bandwidth.omega_bar must be positive");
  if (!(bandwidth.star.w_scale > 0.0)) throw ConfigError("bandwidth.w_scale must be positive");
  if (!holder_alpha.empty() && holder_alpha.size() != d) {
    throw ConfigError("holder_alpha needs one entry per coordinate");
  }
  for (double a : holder_alpha) {
    if (!(a > 0.0)) throw ConfigError("holder_alpha entries must be positive");
  }
  if (eval_points.empty()) throw ConfigError("at least one evaluation point is required");
  for (const auto& x : eval_points) {
    if (x.size() != d) throw ConfigError("evaluation point has wrong dimension");
  }
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (surface.count < 2 || !(surface.hi > surface.lo)) throw ConfigError("surface needs count >= 2 and hi > lo");
  if (rates.n.size() < 2) throw ConfigError("rates.n needs at least two sizes");
  if (!(rates.delta_scale > 0.0)) throw ConfigError("rates.delta_scale must be positive");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(j, "config",
             {"model", "scheme", "simulation", "estimator", "block_size", "bandwidth", "holder_alpha",
              "eval_points", "eval_grid", "replications", "seed", "common_stream", "table2",
              "surface", "rates"});
  ExperimentConfig cfg;
  if (j.contains("model")) parse_model(j["model"], cfg.model);
  cfg.eval_points.assign(1, Point(cfg.model.dim, 0.0));
  if (j.contains("scheme")) parse_scheme(j["scheme"], cfg.scheme);
  if (j.contains("simulation")) parse_simulation(j["simulation"], cfg.simulation);
  if (j.contains("estimator")) parse_estimator(j["estimator"], cfg.estimator);
  if (j.contains("block_size")) parse_block_size(j["block_size"], cfg.block_size);
  if (j.contains("bandwidth")) parse_bandwidth(j["bandwidth"], cfg.bandwidth);
  read(j, "holder_alpha", cfg.holder_alpha);
  if (j.contains("eval_points") && j.contains("eval_grid")) {
    throw ConfigError("give either eval_points or eval_grid, not both");
  }
  read(j, "eval_points", cfg.eval_points);
  if (j.contains("eval_grid")) cfg.eval_points = parse_grid(j["eval_grid"], cfg.model.dim);
  read(j, "replications", cfg.replications);
  read(j, "seed", cfg.seed);
  read(j, "common_stream", cfg.common_stream);
  if (j.contains("table2")) parse_table2(j["table2"], cfg.table2);
  if (j.contains("surface")) parse_surface(j["surface"], cfg.surface);
  if (j.contains("rates")) parse_rates(j["rates"], cfg.rates);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

} // namespace invdens
