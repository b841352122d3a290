#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace invdens {

/// Anisotropic Hoelder smoothness, stored in ascending order.
struct HolderClass {
  std::vector<double> alpha;
  std::vector<double> lipschitz;
  /// permutation[j] is the original coordinate of the j-th smallest alpha.
  std::vector<std::size_t> permutation;

  static HolderClass make(std::vector<double> alpha, std::vector<double> lipschitz = {});
  /// ceil(alpha_d): smallest admissible kernel order.
  int required_kernel_order() const;
};

enum class SmoothnessClass { kLowDim, kD1, kD2, kD3 };

struct RegimeInfo {
  HolderClass holder;
  std::size_t k0 = 1;
  SmoothnessClass smoothness = SmoothnessClass::kLowDim;
  double alpha_bar = 0.0;
  std::optional<double> alpha_bar3;
  double beta_bar = 0.0;
  std::optional<double> beta_bar3;

  std::size_t dim() const noexcept { return holder.alpha.size(); }
  double alpha1() const { return holder.alpha.front(); }
};

/// Harmonic smoothness summaries and the D1/D2/D3 classification. Unsorted
/// input is sorted.
RegimeInfo summarize(std::vector<double> alpha);

/// Break-even sampling interval between the high- and low-frequency regimes.
double breakeven_w_hf(std::size_t n, double delta, const RegimeInfo& regime);

/// High-frequency variance rate.
double v_hf(std::size_t n, double delta, const RegimeInfo& regime);
/// Low-frequency (i.i.d.-like) variance rate n^{-2 abar / (2 abar + d)}.
double v_lf(std::size_t n, const RegimeInfo& regime);

enum class HfExponent {
  /// alpha_bar3 / (alpha_i (2 alpha_bar3 + d - 2)), consistent with v_hf.
  kConsistent,
  /// Denominator (alpha_bar3 + d - 2), as printed for D2 and D3.
  kAsPrinted,
};

struct BandwidthOptions {
  /// Multiplier c in the test p * delta <= c * w_hf.
  double w_scale = 1.0;
  HfExponent hf_exponent = HfExponent::kConsistent;
};

bool is_high_frequency(const RegimeInfo& regime, std::size_t n, double delta, std::size_t p,
                       const BandwidthOptions& options = {});

/// Plug-in bandwidths h^{*,p}, in original coordinate order, clamped into (0, 1].
std::vector<double> bandwidth_star(const RegimeInfo& regime, std::size_t n, double delta,
                                   std::size_t p, const BandwidthOptions& options = {});

/// h_i = T^{-exponent} for every coordinate, clamped into (0, 1].
std::vector<double> bandwidth_horizon(std::size_t n, double delta, std::size_t dim,
                                      double exponent);

enum class PMode {
  /// ceil((tau^{2 alpha_1} / delta)^{1 / (1 + alpha_1)}) v 1.
  kDebias,
  /// floor((tau^2 / delta)^{1/2}) v 1.
  kNumeric,
};

/// Optimal block size, clamped to ceil(delta^{-1/2}).
std::size_t choose_p(double tau, double delta, double alpha1, PMode mode);

enum class RateRegime {
  kSmallNoiseHighFrequency,
  kLargeNoiseHighFrequency,
  kSmallNoiseLowFrequency,
  kLargeNoiseLowFrequency,
};

RateRegime classify_rate_regime(const RegimeInfo& regime, double tau, double delta,
                                std::size_t n, std::size_t p_star,
                                const BandwidthOptions& options = {});

/// MSE-scale bound for the regime the inputs fall in. For tau = 0 the variance
/// rate of the regime is returned.
double predicted_rate(const RegimeInfo& regime, double tau, double delta, std::size_t n,
                      std::size_t p_star, const BandwidthOptions& options = {});

struct HyperparamPlan {
  enum class Frequency { kHigh, kLow };

  std::size_t p_star = 1;
  std::vector<double> h_star;
  Frequency regime = Frequency::kHigh;
  RateRegime rate_regime = RateRegime::kSmallNoiseHighFrequency;
  double predicted_rate = 0.0;
  double w_hf = 0.0;
};

HyperparamPlan make_plan(const RegimeInfo& regime, double tau, double delta, std::size_t n,
                         PMode mode, const BandwidthOptions& options = {});

/// Flat `key=value` lines for logs.
std::string to_key_value(const HyperparamPlan& plan);

std::string to_string(SmoothnessClass c);
std::string to_string(RateRegime r);

} // namespace invdens
