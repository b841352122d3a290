#include "invdens/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "invdens/csv.hpp"
#include "invdens/error.hpp"

namespace invdens {

namespace {

bool same_alpha(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

double horizon_of(std::size_t n, double delta) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  const double t = static_cast<double>(n) * delta;
  if (!(t > 1.0)) throw ParameterError("horizon n * delta must exceed 1");
  return t;
}

/// (abar3 / (2 abar3 + d - 2)) (1/alpha_1 + 1/alpha_2).
double breakeven_exponent(const RegimeInfo& r) {
  const double a3 = *r.alpha_bar3;
  const double d = static_cast<double>(r.dim());
  return a3 / (2.0 * a3 + d - 2.0) * (1.0 / r.holder.alpha[0] + 1.0 / r.holder.alpha[1]);
}

} // namespace

HolderClass HolderClass::make(std::vector<double> alpha, std::vector<double> lipschitz) {
  if (alpha.empty()) throw ParameterError("smoothness vector must be non-empty");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("smoothness indices must be positive");
  }
  if (lipschitz.empty()) lipschitz.assign(alpha.size(), 1.0);
  if (lipschitz.size() != alpha.size()) throw ParameterError("one Hoelder constant per coordinate");
  for (double l : lipschitz) {
    if (!(l > 0.0)) throw ParameterError("Hoelder constants must be positive");
  }
  HolderClass h;
  h.permutation.resize(alpha.size());
  std::iota(h.permutation.begin(), h.permutation.end(), std::size_t{0});
  std::stable_sort(h.permutation.begin(), h.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return alpha[a] < alpha[b]; });
  for (std::size_t j : h.permutation) {
    h.alpha.push_back(alpha[j]);
    h.lipschitz.push_back(lipschitz[j]);
  }
  return h;
}

int HolderClass::required_kernel_order() const {
  return static_cast<int>(std::ceil(alpha.back() - 1e-12));
}

RegimeInfo summarize(std::vector<double> alpha) {
  RegimeInfo r;
  r.holder = HolderClass::make(std::move(alpha));
  const auto& a = r.holder.alpha;
  const std::size_t d = a.size();
  const auto dd = static_cast<double>(d);

  r.k0 = 1;
  while (r.k0 < d && same_alpha(a[r.k0], a[0])) ++r.k0;

  double inv = 0.0;
  for (double v : a) inv += 1.0 / v;
  r.alpha_bar = dd / inv;
  r.beta_bar = 2.0 * r.alpha_bar / (2.0 * r.alpha_bar + dd);

  if (d <= 2) {
    r.smoothness = SmoothnessClass::kLowDim;
    return r;
  }
  double inv3 = 0.0;
  for (std::size_t i = 2; i < d; ++i) inv3 += 1.0 / a[i];
  r.alpha_bar3 = (dd - 2.0) / inv3;
  r.beta_bar3 = 2.0 * *r.alpha_bar3 / (2.0 * *r.alpha_bar3 + dd - 2.0);

  if (r.k0 >= 3) {
    r.smoothness = SmoothnessClass::kD2;
  } else if (r.k0 == 1 && same_alpha(a[1], a[2])) {
    r.smoothness = SmoothnessClass::kD3;
  } else {
    r.smoothness = SmoothnessClass::kD1;
  }
  return r;
}

double breakeven_w_hf(std::size_t n, double delta, const RegimeInfo& regime) {
  const double t = horizon_of(n, delta);
  const double lt = std::log(t);
  switch (regime.smoothness) {
  case SmoothnessClass::kLowDim:
    return lt / t;
  case SmoothnessClass::kD1:
    return lt * std::pow(lt / t, breakeven_exponent(regime));
  case SmoothnessClass::kD2:
  case SmoothnessClass::kD3:
    return std::pow(t, -breakeven_exponent(regime));
  }
  return lt / t;
}

double v_hf(std::size_t n, double delta, const RegimeInfo& regime) {
  const double t = horizon_of(n, delta);
  const double lt = std::log(t);
  if (regime.smoothness == SmoothnessClass::kLowDim) return lt / t;
  const double e = *regime.beta_bar3;
  if (regime.smoothness == SmoothnessClass::kD1) return std::pow(lt / t, e);
  return std::pow(t, -e);
}

double v_lf(std::size_t n, const RegimeInfo& regime) {
  return std::pow(static_cast<double>(n), -regime.beta_bar);
}

bool is_high_frequency(const RegimeInfo& regime, std::size_t n, double delta, std::size_t p,
                       const BandwidthOptions& options) {
  return static_cast<double>(p) * delta <= options.w_scale * breakeven_w_hf(n, delta, regime);
}

std::vector<double> bandwidth_star(const RegimeInfo& regime, std::size_t n, double delta,
                                   std::size_t p, const BandwidthOptions& options) {
  if (p < 1) throw ParameterError("block size must be at least 1");
  const double t = horizon_of(n, delta);
  const std::size_t d = regime.dim();
  const auto dd = static_cast<double>(d);
  const auto& a = regime.holder.alpha;
  std::vector<double> sorted(d);

  if (is_high_frequency(regime, n, delta, p, options)) {
    if (regime.smoothness == SmoothnessClass::kLowDim) {
      std::fill(sorted.begin(), sorted.end(), 1.0 / std::sqrt(t));
    } else {
      const double a3 = *regime.alpha_bar3;
      const bool printed = options.hf_exponent == HfExponent::kAsPrinted &&
                           regime.smoothness != SmoothnessClass::kD1;
      const double denom = printed ? a3 + dd - 2.0 : 2.0 * a3 + dd - 2.0;
      const double base = regime.smoothness == SmoothnessClass::kD1 ? std::log(t) / t : 1.0 / t;
      for (std::size_t i = 0; i < d; ++i) sorted[i] = std::pow(base, a3 / (a[i] * denom));
    }
  } else {
    const double ratio = static_cast<double>(p) / static_cast<double>(n);
    const double ab = regime.alpha_bar;
    for (std::size_t i = 0; i < d; ++i) sorted[i] = std::pow(ratio, ab / (a[i] * (2.0 * ab + dd)));
  }

  std::vector<double> h(d);
  for (std::size_t j = 0; j < d; ++j) {
    h[regime.holder.permutation[j]] = std::clamp(sorted[j], std::numeric_limits<double>::min(), 1.0);
  }
  return h;
}

std::vector<double> bandwidth_horizon(std::size_t n, double delta, std::size_t dim,
                                      double exponent) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  const double t = static_cast<double>(n) * delta;
  const double h = std::clamp(std::pow(t, -exponent), std::numeric_limits<double>::min(), 1.0);
  return std::vector<double>(dim, h);
}

std::size_t choose_p(double tau, double delta, double alpha1, PMode mode) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  if (!(alpha1 > 0.0)) throw ParameterError("alpha_1 must be positive");
  const auto cap = static_cast<std::size_t>(std::ceil(1.0 / std::sqrt(delta)));
  std::size_t p = 1;
  if (mode == PMode::kDebias) {
    const double noise = std::pow(tau, 2.0 * alpha1);
    if (noise > delta) {
      const double raw = std::ceil(std::pow(noise / delta, 1.0 / (1.0 + alpha1)));
      p = std::max<std::size_t>(2, static_cast<std::size_t>(raw));
    }
  } else {
    const double raw = std::floor(std::sqrt(tau * tau / delta));
    p = std::max<std::size_t>(1, static_cast<std::size_t>(raw));
  }
  return std::min(p, std::max<std::size_t>(cap, 1));
}

RateRegime classify_rate_regime(const RegimeInfo& regime, double tau, double delta,
                                std::size_t n, std::size_t p_star,
                                const BandwidthOptions& options) {
  const bool high = is_high_frequency(regime, n, delta, p_star, options);
  const bool small = std::pow(tau, 2.0 * regime.alpha1()) <= delta;
  if (high) {
    return small ? RateRegime::kSmallNoiseHighFrequency : RateRegime::kLargeNoiseHighFrequency;
  }
  return small ? RateRegime::kSmallNoiseLowFrequency : RateRegime::kLargeNoiseLowFrequency;
}

double predicted_rate(const RegimeInfo& regime, double tau, double delta, std::size_t n,
                      std::size_t p_star, const BandwidthOptions& options) {
  const double a1 = regime.alpha1();
  const double noise_bias = std::pow(tau, 2.0 * a1);
  const double averaged = std::pow(tau * tau * delta, a1 / (1.0 + a1));
  switch (classify_rate_regime(regime, tau, delta, n, p_star, options)) {
  case RateRegime::kSmallNoiseHighFrequency: {
    const double v = v_hf(n, delta, regime);
    return tau == 0.0 ? v : std::min(v, noise_bias);
  }
  case RateRegime::kLargeNoiseHighFrequency:
    return std::min(v_hf(n, delta, regime), averaged);
  case RateRegime::kSmallNoiseLowFrequency: {
    const double v = v_lf(n, regime);
    return tau == 0.0 ? v : std::min(v, noise_bias);
  }
  case RateRegime::kLargeNoiseLowFrequency:
    return averaged;
  }
  return averaged;
}

HyperparamPlan make_plan(const RegimeInfo& regime, double tau, double delta, std::size_t n,
                         PMode mode, const BandwidthOptions& options) {
  HyperparamPlan plan;
  plan.p_star = choose_p(tau, delta, regime.alpha1(), mode);
  plan.w_hf = breakeven_w_hf(n, delta, regime);
  plan.h_star = bandwidth_star(regime, n, delta, plan.p_star, options);
  plan.regime = is_high_frequency(regime, n, delta, plan.p_star, options)
                    ? HyperparamPlan::Frequency::kHigh
                    : HyperparamPlan::Frequency::kLow;
  plan.rate_regime = classify_rate_regime(regime, tau, delta, n, plan.p_star, options);
  plan.predicted_rate = predicted_rate(regime, tau, delta, n, plan.p_star, options);
  return plan;
}

std::string to_key_value(const HyperparamPlan& plan) {
  std::ostringstream out;
  out << "p_star=" << plan.p_star << '\n';
  out << "h_star=[";
  for (std::size_t i = 0; i < plan.h_star.size(); ++i) {
    out << (i ? "," : "") << format_shortest(plan.h_star[i]);
  }
  out << "]\n";
  out << "regime=" << (plan.regime == HyperparamPlan::Frequency::kHigh ? "HF" : "LF") << '\n';
  out << "rate_regime=" << to_string(plan.rate_regime) << '\n';
  out << "predicted_rate=" << format_shortest(plan.predicted_rate) << '\n';
  out << "w_hf=" << format_shortest(plan.w_hf) << '\n';
  return out.str();
}

std::string to_string(SmoothnessClass c) {
  switch (c) {
  case SmoothnessClass::kLowDim: return "LowDim";
  case SmoothnessClass::kD1: return "D1";
  case SmoothnessClass::kD2: return "D2";
  case SmoothnessClass::kD3: return "D3";
  }
  return "?";
}

std::string to_string(RateRegime r) {
  switch (r) {
  case RateRegime::kSmallNoiseHighFrequency: return "small-noise-high-frequency";
  case RateRegime::kLargeNoiseHighFrequency: return "large-noise-high-frequency";
  case RateRegime::kSmallNoiseLowFrequency: return "small-noise-low-frequency";
  case RateRegime::kLargeNoiseLowFrequency: return "large-noise-low-frequency";
  }
  return "?";
}

} // namespace invdens
