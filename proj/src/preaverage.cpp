#include "invdens/preaverage.hpp"

#include <cmath>

namespace invdens {

namespace {

/// Pairwise sum of values[first + k * stride] for k in [0, count).
double pairwise_sum(const double* values, std::size_t count, std::size_t stride) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += values[k * stride];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half, stride) + pairwise_sum(values + half * stride, count - half, stride);
}

} // namespace

double effective_noise(double tau, double delta, std::size_t p) {
  if (p < 1) throw ParameterError("block size must be at least 1");
  if (!(tau >= 0.0) || !(delta >= 0.0)) throw ParameterError("tau and delta must be non-negative");
  const auto pp = static_cast<double>(p);
  return std::sqrt(tau * tau / pp + (pp - 1.0) * (2.0 * pp - 1.0) * delta / (12.0 * pp));
}

std::size_t max_trusted_block_size(double delta) {
  return static_cast<std::size_t>(std::ceil(1.0 / std::sqrt(delta)));
}

PreaveragedSample preaverage(const ObservationSeries& series, std::size_t p) {
  const std::size_t n = series.scheme.n;
  if (p < 1) throw ParameterError("block size must be at least 1");
  if (p > n) throw ParameterError("block size exceeds the number of observations");

  PreaveragedSample out;
  out.block_size = p;
  out.scheme = series.scheme;
  out.tau_tilde = effective_noise(series.scheme.tau, series.scheme.delta, p);
  if (p > max_trusted_block_size(series.scheme.delta)) {
    out.warnings.push_back("block size " + std::to_string(p) + " exceeds ceil(delta^{-1/2}) = " +
                           std::to_string(max_trusted_block_size(series.scheme.delta)));
  }

  const std::size_t d = series.dim();
  const std::size_t count = n / p;
  out.blocks = PointSet(d, count);
  const double* raw = series.observed.data().data();
  const double inv_p = 1.0 / static_cast<double>(p);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      out.blocks.at(k, c) = pairwise_sum(raw + k * p * d + c, p, d) * inv_p;
    }
  }
  return out;
}

} // namespace invdens
