#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "invdens/diffusion.hpp"
#include "invdens/estimator.hpp"
#include "invdens/hyperparams.hpp"
#include "invdens/points.hpp"

namespace invdens {

struct ModelSpec {
  enum class Kind { kOrnsteinUhlenbeck, kLogCosh };
  Kind kind = Kind::kOrnsteinUhlenbeck;
  double theta = 0.5;
  double curvature = 1.0;
  std::size_t dim = 1;

  DiffusionModel build() const;
};

struct SimulationSpec {
  enum class Method { kExact, kEuler };
  Method method = Method::kExact;
  std::size_t substeps = 4;
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kPreaveraged;
  int kernel_order = 1;
  int debias_order = 2;
};

struct BlockSizePolicy {
  enum class Kind { kFixed, kNumeric, kDebias };
  Kind kind = Kind::kNumeric;
  std::size_t value = 1;
};

struct BandwidthPolicy {
  enum class Kind { kFixed, kStar, kHorizon, kGl };
  Kind kind = Kind::kStar;
  std::vector<double> values;
  /// h = T^{-exponent} for the horizon policy.
  double exponent = 0.5;
  BandwidthOptions star;
  double omega_bar = 4.0;
  bool use_nu = false;
};

struct Table2Spec {
  /// 0 stands for the numeric optimum p*.
  std::vector<std::size_t> block_sizes{1, 16, 0, 1024, 4096};
  std::vector<double> points{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct SurfaceSpec {
  double lo = -2.0;
  double hi = 2.0;
  std::size_t count = 21;
};

struct RatesSpec {
  std::vector<std::size_t> n{1024, 2048, 4096, 8192, 16384, 32768, 65536};
  /// delta_n = scale * n^{-exponent}.
  double delta_scale = 1.0;
  double delta_exponent = 0.5;
};

struct ExperimentConfig {
  ModelSpec model;
  ObservationScheme scheme{16384, 0.0078125, 1.0, 0};
  SimulationSpec simulation;
  EstimatorSpec estimator;
  BlockSizePolicy block_size;
  BandwidthPolicy bandwidth;
  /// Smoothness used by the plug-in rules; defaults to 2 in every coordinate.
  std::vector<double> holder_alpha;
  std::vector<Point> eval_points{Point{0.0}};
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  /// Every replication reuses stream 0 (degenerate check).
  bool common_stream = false;
  Table2Spec table2;
  SurfaceSpec surface;
  RatesSpec rates;

  std::vector<double> alpha() const;
  void validate() const;
};

/// Parses the JSON config format. Unknown keys and type mismatches raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

} // namespace invdens
