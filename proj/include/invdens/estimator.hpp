#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "invdens/diffusion.hpp"
#include "invdens/kernels.hpp"
#include "invdens/preaverage.hpp"

namespace invdens {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Gaussian-moment matrix a_{k,i} = sum_j C(k,j) (-1)^j m_j i^{k-j} and the
/// first column u of its inverse, held exactly.
class DebiasWeights {
public:
  static constexpr int kMaxOrder = 12;

  explicit DebiasWeights(int order);

  int order() const noexcept { return order_; }
  /// m_0..m_{2l}: standard normal moments.
  const std::vector<BigInt>& moments() const noexcept { return moments_; }
  const BigInt& a(std::size_t k, std::size_t i) const { return matrix_[k * (order_ + 1) + i]; }
  const BigInt& determinant() const noexcept { return determinant_; }
  const std::vector<Rational>& exact() const noexcept { return exact_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// sum over gamma in {0..l}^d of |u_gamma| = (sum_i |u_i|)^d.
  double l1_norm(std::size_t dim) const;

private:
  int order_;
  std::vector<BigInt> moments_;
  std::vector<BigInt> matrix_;
  BigInt determinant_;
  std::vector<Rational> exact_;
  std::vector<double> values_;
};

DebiasWeights debias_weights(int order);

/// prod_{0 <= k < i <= l} (i - k).
BigInt vandermonde_determinant(int order);

enum class EstimatorKind { kNaive, kPreaveraged, kDebiased };

struct DensityEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::kPreaveraged;
  Point x;
  std::size_t block_size = 1;
  std::vector<double> bandwidths;
  int order = 1;
  double tau_tilde = 0.0;
};

/// Largest number of shifted evaluation points (l+1)^d accepted by mu_hat.
inline constexpr double kMaxShiftedPoints = 1e6;

/// count^{-1} sum_k sum_gamma u_gamma prod_i f_i(x_i + gamma_i * shift - z_{k,i}),
/// evaluated as count^{-1} sum_k prod_i sum_g u_g f_i(x_i + g * shift - z_{k,i}),
/// which is the same sum regrouped because u_gamma factorizes.
/// `factor(i, y)` is the coordinate kernel and `radius[i]` its support half-width.
template <typename Factor>
double shifted_kernel_mean(std::span<const double> points, std::size_t count, std::size_t dim,
                           std::span<const double> x, std::span<const double> u, double shift,
                           std::span<const double> radius, Factor&& factor) {
  const double span_width = shift * static_cast<double>(u.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double* z = points.data() + k * dim;
    double prod = 1.0;
    for (std::size_t i = 0; i < dim && prod != 0.0; ++i) {
      const double y0 = x[i] - z[i];
      if (y0 > radius[i] || y0 + span_width < -radius[i]) {
        prod = 0.0;
        break;
      }
      double s = 0.0;
      for (std::size_t g = 0; g < u.size(); ++g) {
        if (u[g] != 0.0) s += u[g] * factor(i, y0 + static_cast<double>(g) * shift);
      }
      prod *= s;
    }
    total += prod;
  }
  return total / static_cast<double>(count);
}

/// n_p^{-1} sum_k K_h(x - Ybar_k).
DensityEstimate nu_hat(const PreaveragedSample& sample, const ProductKernel& kernel,
                       std::span<const double> x);

/// sum_gamma u_gamma nu_hat(x + gamma * tau_tilde).
DensityEstimate mu_hat(const PreaveragedSample& sample, const ProductKernel& kernel,
                       const DebiasWeights& weights, std::span<const double> x);

/// n^{-1} sum_{k<n} K_h(x - Y_k) on the raw observations.
DensityEstimate naive_kb(const ObservationSeries& series, const ProductKernel& kernel,
                         std::span<const double> x);

/// Invariant density convolved with N(0, tau^2 I), by adaptive quadrature.
double smoothed_target(const DiffusionModel& model, double tau, std::span<const double> x);

} // namespace invdens
