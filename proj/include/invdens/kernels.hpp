#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace invdens {

/// Nodes and weights of a Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Fixed 64-point Gauss-Legendre rule (exact for polynomials of degree <= 127).
const QuadratureRule& gauss_legendre_64();

/// Integral of f over [a, b] with the 64-point rule.
template <typename F>
double integrate_gl64(F&& f, double a, double b) {
  const auto& rule = gauss_legendre_64();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s;
}

/// One-dimensional kernel of order l: integral 1, vanishing moments 1..l-1.
class Kernel1D {
public:
  enum class Family { kLegendre, kGaussian };

  /// Polynomial kernel on [-1, 1] built from even Legendre polynomials.
  static Kernel1D legendre(int order);

  /// Standard normal density truncated at 8. Diagnostics only: it is not
  /// compactly supported in the sense required by the estimator.
  static Kernel1D gaussian();

  double operator()(double y) const noexcept;

  int order() const noexcept { return order_; }
  Family family() const noexcept { return family_; }
  double support_radius() const noexcept { return radius_; }
  double sup_norm() const noexcept { return sup_norm_; }
  bool compact() const noexcept { return family_ == Family::kLegendre; }
  /// Coefficients c_m of the even Legendre polynomials P_0, P_2, ...
  const std::vector<double>& legendre_coefficients() const noexcept { return coeffs_; }

  friend bool operator==(const Kernel1D& a, const Kernel1D& b) {
    return a.family_ == b.family_ && a.order_ == b.order_;
  }

private:
  Kernel1D(Family family, int order, double radius, std::vector<double> coeffs);

  Family family_;
  int order_;
  double radius_;
  std::vector<double> coeffs_;
  double sup_norm_ = 0.0;
};

Kernel1D make_order_kernel(int order);

/// Integral of y^k K(y) dy with the 64-point rule over the support.
double kernel_moment(const Kernel1D& kernel, int k);

/// K_h(y) = prod_i h_i^{-1} K(y_i / h_i).
class ProductKernel {
public:
  ProductKernel(Kernel1D base, std::vector<double> bandwidths);

  double operator()(std::span<const double> y) const;
  /// h_i^{-1} K(y / h_i) for coordinate i.
  double factor(std::size_t coord, double y) const noexcept {
    return base_(y / bandwidths_[coord]) / bandwidths_[coord];
  }
  /// Half-width of the support of coordinate i.
  double radius(std::size_t coord) const noexcept {
    return base_.support_radius() * bandwidths_[coord];
  }

  std::size_t dim() const noexcept { return bandwidths_.size(); }
  const Kernel1D& base() const noexcept { return base_; }
  const std::vector<double>& bandwidths() const noexcept { return bandwidths_; }

private:
  Kernel1D base_;
  std::vector<double> bandwidths_;
};

/// Tabulated (K_a)_h * (K_b)_eta on its support with piecewise-cubic
/// interpolation. Table pieces are split at the kinks +-(r_a h +- r_b eta), so
/// the interpolant is smooth within each piece.
class ConvolvedKernel1D {
public:
  double operator()(double z) const noexcept;

  double support_radius() const noexcept { return radius_; }
  std::size_t node_count() const noexcept;
  /// Integral of the interpolant over the support.
  double integral() const;
  /// Exact value at z by quadrature, bypassing the table.
  double exact(double z) const;

private:
  friend ConvolvedKernel1D convolve(const Kernel1D&, double, const Kernel1D&, double, std::size_t);

  struct Piece {
    double lo;
    double step;
    std::vector<double> values;
  };

  Kernel1D left_ = Kernel1D::legendre(1);
  Kernel1D right_ = Kernel1D::legendre(1);
  double h_ = 1.0;
  double eta_ = 1.0;
  double radius_ = 0.0;
  std::vector<Piece> pieces_;
};

/// Convolution of two compactly supported kernels scaled by h and eta.
/// Throws UnsupportedError for non-compact kernels and NumericalError when the
/// tabulated kernel misses unit mass by more than 1e-6.
ConvolvedKernel1D convolve(const Kernel1D& a, double h, const Kernel1D& b, double eta,
                           std::size_t min_nodes = 512);

} // namespace invdens
