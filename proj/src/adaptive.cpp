#include "invdens/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "invdens/csv.hpp"
#include "invdens/error.hpp"

namespace invdens {

namespace {

void enumerate_sorted(const std::vector<double>& levels, std::size_t dim, std::size_t from,
                      std::vector<double>& current, std::vector<std::vector<double>>& out) {
  if (current.size() == dim) {
    out.push_back(current);
    return;
  }
  for (std::size_t j = from; j < levels.size(); ++j) {
    current.push_back(levels[j]);
    enumerate_sorted(levels, dim, j, current, out);
    current.pop_back();
  }
}

void check_sorted(std::span<const double> h) {
  if (h.size() < 3) throw ParameterError("variance proxy needs d >= 3");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0 && h[i] <= 1.0)) throw ParameterError("bandwidths must lie in (0, 1]");
    if (i > 0 && h[i] < h[i - 1]) throw ParameterError("bandwidths must be sorted ascending");
  }
}

struct ConvKey {
  double h;
  double eta;
  auto operator<=>(const ConvKey&) const = default;
};

} // namespace

BandwidthGrid build_grid(std::size_t n_p, double horizon, std::size_t dim) {
  if (dim < 3) {
    throw UnsupportedError("adaptive selection needs d >= 3; use bandwidth_star for d < 3");
  }
  if (n_p < 8) throw ParameterError("adaptive selection needs at least 8 blocks");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");

  BandwidthGrid grid;
  grid.n_p = n_p;
  grid.horizon = horizon;
  grid.dim = dim;
  const double lp = std::log(static_cast<double>(n_p));
  grid.floor = std::pow(lp * lp * lp / static_cast<double>(n_p), 1.0 / static_cast<double>(dim));

  // Levels in ascending order so that enumeration is lexicographic.
  std::vector<double> levels;
  for (double v = 1.0; v >= grid.floor && v > 0.0; v *= 0.5) levels.push_back(v);
  if (levels.empty()) levels.push_back(1.0);
  std::reverse(levels.begin(), levels.end());

  std::vector<std::vector<double>> all;
  std::vector<double> current;
  enumerate_sorted(levels, dim, 0, current, all);

  const auto cap = static_cast<std::size_t>(std::max(1.0, std::floor(horizon)));
  if (all.size() <= cap) {
    grid.candidates = std::move(all);
  } else {
    for (std::size_t i = 0; i < cap; ++i) grid.candidates.push_back(all[i * all.size() / cap]);
  }
  return grid;
}

double variance_proxy(std::span<const double> h, std::size_t p, double delta, double horizon) {
  check_sorted(h);
  if (!(delta > 0.0) || !(horizon > 0.0)) throw ParameterError("delta and horizon must be positive");
  double inv_all = 1.0;
  double inv_from3 = 1.0;
  double inv_from4 = 1.0;
  double logs = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    inv_all /= h[i];
    if (i >= 2) inv_from3 /= h[i];
    if (i >= 3) inv_from4 /= h[i];
    logs += std::abs(std::log(h[i]));
  }
  const double t1 = logs * inv_from3;
  const double t2 = inv_from4 / std::sqrt(h[1] * h[2]);
  return (static_cast<double>(p) * delta * inv_all + std::min(t1, t2)) / horizon;
}

double penalty(std::span<const double> h, std::size_t n_p, double omega_bar, std::size_t p,
               double delta, double horizon) {
  if (!(omega_bar > 0.0)) throw ParameterError("omega_bar must be positive");
  if (n_p < 1) throw ParameterError("n_p must be positive");
  return omega_bar * std::log(static_cast<double>(n_p)) * variance_proxy(h, p, delta, horizon);
}

GLState gl_select(const PreaveragedSample& sample, const BandwidthGrid& grid,
                  const Kernel1D& base_kernel, const DebiasWeights& weights,
                  std::span<const double> x, const GLOptions& options) {
  const std::size_t d = sample.dim();
  if (d < 3) throw UnsupportedError("adaptive selection needs d >= 3");
  if (grid.candidates.empty()) throw ParameterError("bandwidth grid is empty");
  if (grid.dim != d) throw DimensionalityError("grid dimension does not match the sample");
  if (x.size() != d) throw DimensionalityError("evaluation point has wrong dimension");
  if (sample.count() == 0) throw ParameterError("pre-averaged sample is empty");
  if (!(options.omega_bar > 0.0)) throw ParameterError("omega_bar must be positive");

  static constexpr double kUnit[] = {1.0};
  const std::span<const double> u =
      options.use_nu ? std::span<const double>(kUnit) : std::span<const double>(weights.values());
  const double shift = options.use_nu ? 0.0 : sample.tau_tilde;

  GLState state;
  state.omega_bar = options.omega_bar;
  const std::size_t m = grid.size();
  const std::size_t p = sample.block_size;
  const double delta = sample.scheme.delta;
  const double horizon = sample.scheme.horizon();

  for (const auto& h : grid.candidates) {
    GLCandidate c;
    c.h = h;
    c.penalty = penalty(h, sample.count(), options.omega_bar, p, delta, horizon);
    ProductKernel k(base_kernel, h);
    std::vector<double> r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = k.radius(i);
    c.estimate = shifted_kernel_mean(sample.blocks.data(), sample.count(), d, x, u, shift, r,
                                     [&](std::size_t i, double y) { return k.factor(i, y); });
    state.candidates.push_back(std::move(c));
  }

  std::map<ConvKey, ConvolvedKernel1D> conv_cache;
  auto conv = [&](double a, double b) -> const ConvolvedKernel1D& {
    const ConvKey key{std::min(a, b), std::max(a, b)};
    auto it = conv_cache.find(key);
    if (it == conv_cache.end()) {
      it = conv_cache.emplace(key, convolve(base_kernel, key.h, base_kernel, key.eta)).first;
    }
    return it->second;
  };

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      std::vector<const ConvolvedKernel1D*> ks(d);
      std::vector<double> r(d);
      for (std::size_t c = 0; c < d; ++c) {
        ks[c] = &conv(grid.candidates[i][c], grid.candidates[j][c]);
        r[c] = ks[c]->support_radius();
      }
      state.pairwise[{i, j}] =
          shifted_kernel_mean(sample.blocks.data(), sample.count(), d, x, u, shift, r,
                              [&](std::size_t c, double y) { return (*ks[c])(y); });
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    double a = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = state.pair(i, j) - state.candidates[j].estimate;
      a = std::max(a, diff * diff - state.candidates[j].penalty);
    }
    auto& c = state.candidates[i];
    c.bias_proxy = a;
    c.criterion = a + c.penalty;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i) {
    const auto& c = state.candidates[i];
    const auto& b = state.candidates[best];
    if (c.criterion < b.criterion || (c.criterion == b.criterion && c.h < b.h)) best = i;
  }
  state.selected = best;
  return state;
}

double bernstein_beta(const DebiasWeights& weights, std::size_t dim) {
  double s = 0.0;
  for (double v : weights.values()) s += v * v;
  const double norm = std::pow(s, 0.5 * static_cast<double>(dim));
  return 1.0 / (std::sqrt(static_cast<double>(dim) * weights.order()) * norm);
}

void write_gl_trace_csv(std::ostream& out, const GLState& state) {
  const std::size_t d = state.candidates.empty() ? 0 : state.candidates.front().h.size();
  for (std::size_t i = 0; i < d; ++i) out << "h_" << (i + 1) << ',';
  out << "A,V,criterion,selected\n";
  for (std::size_t k = 0; k < state.candidates.size(); ++k) {
    const auto& c = state.candidates[k];
    for (double h : c.h) out << format_shortest(h) << ',';
    out << format_shortest(c.bias_proxy) << ',' << format_shortest(c.penalty) << ','
        << format_shortest(c.criterion) << ',' << (k == state.selected ? 1 : 0) << '\n';
  }
}

} // namespace invdens
