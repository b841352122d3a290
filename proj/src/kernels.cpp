#include "invdens/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "invdens/error.hpp"

namespace invdens {

namespace {

QuadratureRule build_gl64() {
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  QuadratureRule rule;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    rule.nodes.push_back(-abscissa[i]);
    rule.weights.push_back(weights[i]);
    rule.nodes.push_back(abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  return rule;
}

/// P_m(0) for even m: (-1)^{m/2} (m-1)!! / m!!.
double legendre_at_zero(int m) {
  double v = 1.0;
  for (int k = 2; k <= m; k += 2) v *= -static_cast<double>(k - 1) / static_cast<double>(k);
  return v;
}

double cubic_lagrange(const double* y, double t) {
  // Nodes at 0, 1, 2, 3.
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

} // namespace

const QuadratureRule& gauss_legendre_64() {
  static const QuadratureRule rule = build_gl64();
  return rule;
}

Kernel1D::Kernel1D(Family family, int order, double radius, std::vector<double> coeffs)
    : family_(family), order_(order), radius_(radius), coeffs_(std::move(coeffs)) {
  // Dense scan; the margin covers the curvature between samples.
  constexpr int kSamples = 20001;
  double m = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double y = -radius_ + 2.0 * radius_ * i / (kSamples - 1);
    m = std::max(m, std::abs((*this)(y)));
  }
  sup_norm_ = m * (1.0 + 1e-6);
}

Kernel1D Kernel1D::legendre(int order) {
  if (order < 1) throw ParameterError("kernel order must be at least 1");
  std::vector<double> coeffs;
  for (int m = 0; m <= order - 1; m += 2) {
    coeffs.push_back(legendre_at_zero(m) * (2.0 * m + 1.0) / 2.0);
  }
  return Kernel1D(Family::kLegendre, order, 1.0, std::move(coeffs));
}

Kernel1D Kernel1D::gaussian() { return Kernel1D(Family::kGaussian, 2, 8.0, {}); }

double Kernel1D::operator()(double y) const noexcept {
  if (std::abs(y) > radius_) return 0.0;
  if (family_ == Family::kGaussian) return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
  // Legendre recurrence; coefficients sit on even degrees.
  double p_prev = 1.0;
  double p = y;
  double s = coeffs_[0];
  const int top = 2 * static_cast<int>(coeffs_.size()) - 2;
  for (int m = 1; m < top; ++m) {
    const double next = ((2.0 * m + 1.0) * y * p - m * p_prev) / (m + 1.0);
    p_prev = p;
    p = next;
    if ((m + 1) % 2 == 0) s += coeffs_[static_cast<std::size_t>((m + 1) / 2)] * p;
  }
  return s;
}

Kernel1D make_order_kernel(int order) { return Kernel1D::legendre(order); }

double kernel_moment(const Kernel1D& kernel, int k) {
  const double r = kernel.support_radius();
  return integrate_gl64([&](double y) { return std::pow(y, k) * kernel(y); }, -r, r);
}

ProductKernel::ProductKernel(Kernel1D base, std::vector<double> bandwidths)
    : base_(std::move(base)), bandwidths_(std::move(bandwidths)) {
  if (bandwidths_.empty()) throw ParameterError("product kernel needs at least one bandwidth");
  for (double h : bandwidths_) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("bandwidths must be positive");
  }
}

double ProductKernel::operator()(std::span<const double> y) const {
  if (y.size() != bandwidths_.size()) throw DimensionalityError("point has wrong dimension");
  double v = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > radius(i)) return 0.0;
    v *= factor(i, y[i]);
  }
  return v;
}

double ConvolvedKernel1D::exact(double z) const {
  const double a = left_.support_radius() * h_;
  const double b = right_.support_radius() * eta_;
  const double lo = std::max(-b, z - a);
  const double hi = std::min(b, z + a);
  if (!(hi > lo)) return 0.0;
  return integrate_gl64(
      [&](double u) { return left_((z - u) / h_) / h_ * right_(u / eta_) / eta_; }, lo, hi);
}

double ConvolvedKernel1D::operator()(double z) const noexcept {
  if (!(std::abs(z) <= radius_)) return 0.0;
  for (const auto& piece : pieces_) {
    const double hi = piece.lo + piece.step * static_cast<double>(piece.values.size() - 1);
    if (z > hi && &piece != &pieces_.back()) continue;
    const double t = (z - piece.lo) / piece.step;
    const auto last = static_cast<std::ptrdiff_t>(piece.values.size()) - 4;
    const auto start = std::clamp(static_cast<std::ptrdiff_t>(std::floor(t)) - 1,
                                  std::ptrdiff_t{0}, last);
    return cubic_lagrange(piece.values.data() + start, t - static_cast<double>(start));
  }
  return 0.0;
}

std::size_t ConvolvedKernel1D::node_count() const noexcept {
  std::size_t n = 0;
  for (const auto& piece : pieces_) n += piece.values.size();
  return n;
}

double ConvolvedKernel1D::integral() const {
  // Three-point Gauss rule per node interval; the interpolant is cubic there.
  static const double g = std::sqrt(0.6);
  double total = 0.0;
  for (const auto& piece : pieces_) {
    for (std::size_t j = 0; j + 1 < piece.values.size(); ++j) {
      const double mid = piece.lo + piece.step * (static_cast<double>(j) + 0.5);
      const double half = 0.5 * piece.step;
      total += half * ((5.0 / 9.0) * (*this)(mid - g * half) + (8.0 / 9.0) * (*this)(mid) +
                       (5.0 / 9.0) * (*this)(mid + g * half));
    }
  }
  return total;
}

ConvolvedKernel1D convolve(const Kernel1D& a, double h, const Kernel1D& b, double eta,
                           std::size_t min_nodes) {
  if (!a.compact() || !b.compact()) {
    throw UnsupportedError("convolution requires compactly supported kernels");
  }
  if (!(h > 0.0) || !(eta > 0.0)) throw ParameterError("bandwidths must be positive");
  ConvolvedKernel1D out;
  out.left_ = a;
  out.right_ = b;
  out.h_ = h;
  out.eta_ = eta;
  const double ra = a.support_radius() * h;
  const double rb = b.support_radius() * eta;
  out.radius_ = ra + rb;

  std::vector<double> breaks{-(ra + rb), -std::abs(ra - rb), std::abs(ra - rb), ra + rb};
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [&](double x, double y) { return std::abs(x - y) <= 1e-14 * out.radius_; }),
               breaks.end());

  const double total = 2.0 * out.radius_;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k];
    const double len = breaks[k + 1] - lo;
    const auto count = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil(static_cast<double>(min_nodes) * len / total)) + 1);
    ConvolvedKernel1D::Piece piece{lo, len / static_cast<double>(count - 1), {}};
    piece.values.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double z = (j + 1 == count) ? breaks[k + 1] : lo + piece.step * static_cast<double>(j);
      piece.values.push_back(out.exact(z));
    }
    out.pieces_.push_back(std::move(piece));
  }

  const double mass = out.integral();
  if (!(std::abs(mass - 1.0) <= 1e-6)) {
    throw NumericalError("convolved kernel mass " + std::to_string(mass) + " differs from 1");
  }
  return out;
}

} // namespace invdens
