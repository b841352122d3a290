#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "invdens/estimator.hpp"
#include "invdens/kernels.hpp"
#include "invdens/preaverage.hpp"

namespace invdens {

/// Dyadic candidate bandwidths, each sorted ascending, in lexicographic order.
struct BandwidthGrid {
  std::vector<std::vector<double>> candidates;
  std::size_t n_p = 0;
  double horizon = 0.0;
  /// (log(n_p)^3 / n_p)^{1/d}.
  double floor = 0.0;
  std::size_t dim = 0;

  std::size_t size() const noexcept { return candidates.size(); }
};

/// Throws UnsupportedError for d < 3; use bandwidth_star there.
/// When the floor exceeds 1 the grid is the single vector (1, ..., 1).
BandwidthGrid build_grid(std::size_t n_p, double horizon, std::size_t dim);

/// T^{-1} (p delta prod h^{-1} + min(sum |log h_i| prod_{i>=3} h_i^{-1},
/// (h_2 h_3)^{-1/2} prod_{i>=4} h_i^{-1})). h must be sorted ascending.
double variance_proxy(std::span<const double> h, std::size_t p, double delta, double horizon);

/// omega_bar * log(n_p) * variance_proxy.
double penalty(std::span<const double> h, std::size_t n_p, double omega_bar, std::size_t p,
               double delta, double horizon);

inline constexpr double kDefaultOmegaBar = 4.0;

struct GLOptions {
  double omega_bar = kDefaultOmegaBar;
  /// Use the order-1 weights (plain pre-averaged estimator) instead of the debiased one.
  bool use_nu = false;
};

struct GLCandidate {
  std::vector<double> h;
  double penalty = 0.0;
  double bias_proxy = 0.0;
  double criterion = 0.0;
  /// Single-bandwidth estimate at x.
  double estimate = 0.0;
};

struct GLState {
  std::vector<GLCandidate> candidates;
  /// Estimates with kernel K_h * K_eta, keyed by the unordered index pair (i <= j).
  std::map<std::pair<std::size_t, std::size_t>, double> pairwise;
  double omega_bar = kDefaultOmegaBar;
  std::size_t selected = 0;

  const std::vector<double>& h_star() const { return candidates.at(selected).h; }
  double pair(std::size_t i, std::size_t j) const {
    return pairwise.at(i <= j ? std::pair{i, j} : std::pair{j, i});
  }
};

GLState gl_select(const PreaveragedSample& sample, const BandwidthGrid& grid,
                  const Kernel1D& base_kernel, const DebiasWeights& weights,
                  std::span<const double> x, const GLOptions& options = {});

/// 1 / (sqrt(d l) ||u||_2), reported only.
double bernstein_beta(const DebiasWeights& weights, std::size_t dim);

/// Header `h_1..h_d,A,V,criterion,selected`.
void write_gl_trace_csv(std::ostream& out, const GLState& state);

} // namespace invdens
