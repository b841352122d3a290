#include "invdens/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace invdens {

namespace {

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

BigInt int_pow(int base, int exp) {
  BigInt r = 1;
  for (int j = 0; j < exp; ++j) r *= base;
  return r;
}

/// Bareiss fraction-free elimination; returns the exact determinant.
BigInt bareiss_determinant(std::vector<BigInt> m, std::size_t n) {
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap * n + k] == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[swap * n + c]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
      }
    }
    prev = m[k * n + k];
  }
  return sign * m[(n - 1) * n + (n - 1)];
}

/// Solves M x = e_0 exactly.
std::vector<Rational> solve_first_unit(const std::vector<BigInt>& matrix, std::size_t n) {
  std::vector<Rational> m(n * (n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r * (n + 1) + c] = Rational(matrix[r * n + c]);
    m[r * (n + 1) + n] = (r == 0) ? 1 : 0;
  }
  const std::size_t w = n + 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m[pivot * w + k] == 0) ++pivot;
    if (pivot == n) throw NumericalError("moment matrix is singular");
    if (pivot != k) {
      for (std::size_t c = 0; c < w; ++c) std::swap(m[k * w + c], m[pivot * w + c]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k || m[r * w + k] == 0) continue;
      const Rational f = m[r * w + k] / m[k * w + k];
      for (std::size_t c = k; c < w; ++c) m[r * w + c] -= f * m[k * w + c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = m[r * w + n] / m[r * w + r];
  return x;
}

std::vector<double> cell(std::span<const double> x) { return {x.begin(), x.end()}; }

} // namespace

BigInt vandermonde_determinant(int order) {
  BigInt det = 1;
  for (int i = 1; i <= order; ++i) {
    for (int k = 0; k < i; ++k) det *= (i - k);
  }
  return det;
}

DebiasWeights::DebiasWeights(int order) : order_(order) {
  if (order < 1) throw ParameterError("debias order must be at least 1");
  if (order > kMaxOrder) {
    throw ParameterError("debias order " + std::to_string(order) + " exceeds the cap " +
                         std::to_string(kMaxOrder));
  }
  const auto n = static_cast<std::size_t>(order + 1);
  moments_.resize(2 * n - 1);
  moments_[0] = 1;
  for (std::size_t j = 1; j < moments_.size(); ++j) {
    moments_[j] = (j % 2 == 1) ? BigInt(0) : moments_[j - 2] * static_cast<int>(j - 1);
  }

  matrix_.resize(n * n);
  for (int k = 0; k <= order; ++k) {
    for (int i = 0; i <= order; ++i) {
      BigInt s = 0;
      for (int j = 0; j <= k; ++j) {
        BigInt term = binomial(k, j) * moments_[static_cast<std::size_t>(j)] * int_pow(i, k - j);
        s += (j % 2 == 0) ? term : BigInt(-term);
      }
      matrix_[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(i)] = s;
    }
  }

  determinant_ = bareiss_determinant(matrix_, n);
  if (determinant_ != vandermonde_determinant(order)) {
    throw NumericalError("moment matrix determinant does not match the Vandermonde product");
  }
  exact_ = solve_first_unit(matrix_, n);
  for (std::size_t k = 0; k < n; ++k) {
    Rational row = 0;
    for (std::size_t i = 0; i < n; ++i) row += Rational(matrix_[k * n + i]) * exact_[i];
    if (row != (k == 0 ? 1 : 0)) throw NumericalError("exact weight solve failed verification");
  }
  for (const auto& q : exact_) values_.push_back(q.convert_to<double>());
}

double DebiasWeights::l1_norm(std::size_t dim) const {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return std::pow(s, static_cast<double>(dim));
}

DebiasWeights debias_weights(int order) { return DebiasWeights(order); }

namespace {

std::vector<double> radii(const ProductKernel& kernel) {
  std::vector<double> r(kernel.dim());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = kernel.radius(i);
  return r;
}

void check_point(const ProductKernel& kernel, std::size_t dim, std::span<const double> x) {
  if (kernel.dim() != dim || x.size() != dim) {
    throw DimensionalityError("kernel, data and evaluation point dimensions disagree");
  }
}

} // namespace

DensityEstimate nu_hat(const PreaveragedSample& sample, const ProductKernel& kernel,
                       std::span<const double> x) {
  check_point(kernel, sample.dim(), x);
  if (sample.count() == 0) throw ParameterError("pre-averaged sample is empty");
  static constexpr double kUnit[] = {1.0};
  const auto r = radii(kernel);
  const double v = shifted_kernel_mean(sample.blocks.data(), sample.count(), sample.dim(), x,
                                       kUnit, 0.0, r,
                                       [&](std::size_t i, double y) { return kernel.factor(i, y); });
  return {v, EstimatorKind::kPreaveraged, cell(x), sample.block_size, kernel.bandwidths(), 1,
          sample.tau_tilde};
}

DensityEstimate mu_hat(const PreaveragedSample& sample, const ProductKernel& kernel,
                       const DebiasWeights& weights, std::span<const double> x) {
  check_point(kernel, sample.dim(), x);
  if (sample.count() == 0) throw ParameterError("pre-averaged sample is empty");
  const double shifted = std::pow(weights.order() + 1.0, static_cast<double>(sample.dim()));
  if (shifted > kMaxShiftedPoints) {
    throw DimensionalityError("(l+1)^d shifted evaluation points exceed 1e6");
  }
  const auto r = radii(kernel);
  const double v = shifted_kernel_mean(sample.blocks.data(), sample.count(), sample.dim(), x,
                                       weights.values(), sample.tau_tilde, r,
                                       [&](std::size_t i, double y) { return kernel.factor(i, y); });
  return {v, EstimatorKind::kDebiased, cell(x), sample.block_size, kernel.bandwidths(),
          weights.order(), sample.tau_tilde};
}

DensityEstimate naive_kb(const ObservationSeries& series, const ProductKernel& kernel,
                         std::span<const double> x) {
  check_point(kernel, series.dim(), x);
  static constexpr double kUnit[] = {1.0};
  const auto r = radii(kernel);
  const std::size_t n = series.scheme.n;
  const double v = shifted_kernel_mean(series.observed.data(), n, series.dim(), x, kUnit, 0.0, r,
                                       [&](std::size_t i, double y) { return kernel.factor(i, y); });
  return {v, EstimatorKind::kNaive, cell(x), 1, kernel.bandwidths(), 1, series.scheme.tau};
}

double smoothed_target(const DiffusionModel& model, double tau, std::span<const double> x) {
  if (!model.has_density()) throw UnsupportedError("model has no analytic invariant density");
  if (x.size() != model.dim()) throw DimensionalityError("evaluation point has wrong dimension");
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  if (tau == 0.0) return model.density(x);

  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto convolve_1d = [&](const Density1D& f, double xi) {
    return Quad::integrate(
        [&](double z) { return f(xi - tau * z) * norm * std::exp(-0.5 * z * z); }, -inf, inf, 20,
        1e-13);
  };
  if (model.has_marginals()) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) v *= convolve_1d(model.marginals()[i], x[i]);
    return v;
  }
  if (model.dim() == 1) {
    return convolve_1d([&](double y) { return model.density(std::span<const double>(&y, 1)); }, x[0]);
  }
  throw UnsupportedError("smoothed target needs a product density or d = 1");
}

} // namespace invdens
