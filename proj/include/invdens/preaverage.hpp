#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "invdens/diffusion.hpp"
#include "invdens/points.hpp"

namespace invdens {

/// Non-overlapping block means of p consecutive observations. The trailing
/// n - p * floor(n / p) observations are dropped.
struct PreaveragedSample {
  std::size_t block_size = 1;
  PointSet blocks;
  double tau_tilde = 0.0;
  ObservationScheme scheme;
  std::vector<std::string> warnings;

  std::size_t count() const noexcept { return blocks.size(); }
  std::size_t dim() const noexcept { return blocks.dim(); }
};

/// sqrt(tau^2 / p + (p - 1)(2p - 1) delta / (12 p)).
double effective_noise(double tau, double delta, std::size_t p);

/// Largest block size for which the smoothing approximation is trusted: ceil(delta^{-1/2}).
std::size_t max_trusted_block_size(double delta);

PreaveragedSample preaverage(const ObservationSeries& series, std::size_t p);

} // namespace invdens
