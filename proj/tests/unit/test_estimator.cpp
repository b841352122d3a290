#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "invdens/diffusion.hpp"
#include "invdens/error.hpp"
#include "invdens/estimator.hpp"
#include "invdens/preaverage.hpp"

using namespace invdens;

namespace {

PreaveragedSample sample_from(const std::vector<std::vector<double>>& pts, double tau_tilde = 0.0) {
  PreaveragedSample s;
  s.blocks = PointSet(pts.front().size(), pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (std::size_t c = 0; c < pts[k].size(); ++c) s.blocks.at(k, c) = pts[k][c];
  }
  s.tau_tilde = tau_tilde;
  s.scheme = {pts.size(), 0.1, 0.0, 0};
  return s;
}

double normal_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

} // namespace

TEST(DebiasWeights, OrderOneAndTwo) {
  const auto w1 = debias_weights(1);
  EXPECT_EQ(w1.a(0, 0), 1);
  EXPECT_EQ(w1.a(0, 1), 1);
  EXPECT_EQ(w1.a(1, 0), 0);
  EXPECT_EQ(w1.a(1, 1), 1);
  EXPECT_EQ(w1.determinant(), 1);
  EXPECT_EQ(w1.exact()[0], Rational(1));
  EXPECT_EQ(w1.exact()[1], Rational(0));

  const auto w2 = debias_weights(2);
  const int expected[3][3] = {{1, 1, 1}, {0, 1, 2}, {1, 2, 5}};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) EXPECT_EQ(w2.a(k, i), expected[k][i]) << k << "," << i;
  }
  EXPECT_EQ(w2.determinant(), 2);
  EXPECT_EQ(w2.exact()[0], Rational(1, 2));
  EXPECT_EQ(w2.exact()[1], Rational(1));
  EXPECT_EQ(w2.exact()[2], Rational(-1, 2));
}

TEST(DebiasWeights, ExactIdentitiesUpToCap) {
  for (int l = 1; l <= DebiasWeights::kMaxOrder; ++l) {
    const auto w = debias_weights(l);
    EXPECT_EQ(w.determinant(), vandermonde_determinant(l)) << l;
    Rational sum = 0;
    for (const auto& u : w.exact()) sum += u;
    EXPECT_EQ(sum, Rational(1));
    for (int k = 0; k <= l; ++k) {
      Rational row = 0;
      for (int i = 0; i <= l; ++i) row += Rational(w.a(k, i)) * w.exact()[i];
      EXPECT_EQ(row, Rational(k == 0 ? 1 : 0)) << "l=" << l << " k=" << k;
    }
    for (int i = 0; i <= l; ++i) {
      const double exact = static_cast<double>(w.exact()[i]);
      if (exact != 0.0) {
        EXPECT_LT(std::abs(w.values()[i] / exact - 1.0), 1e-14);
      }
    }
    // Moments of a standard normal: m_j = (j - 1)!! for even j.
    EXPECT_EQ(w.moments()[2], 1);
    if (l >= 2) {
      EXPECT_EQ(w.moments()[4], 3);
    }
    if (l >= 3) {
      EXPECT_EQ(w.moments()[6], 15);
    }
  }
  EXPECT_THROW(debias_weights(0), ParameterError);
  EXPECT_THROW(debias_weights(DebiasWeights::kMaxOrder + 1), ParameterError);
}

TEST(DebiasWeights, VandermondeProduct) {
  EXPECT_EQ(vandermonde_determinant(1), 1);
  EXPECT_EQ(vandermonde_determinant(2), 2);
  EXPECT_EQ(vandermonde_determinant(3), 12);
  EXPECT_EQ(vandermonde_determinant(4), 288);
  const auto w = debias_weights(3);
  EXPECT_NEAR(w.l1_norm(2), std::pow(w.l1_norm(1), 2), 1e-12);
}

TEST(NuHat, HandValues) {
  const ProductKernel k(make_order_kernel(1), {1.0});
  const auto s = sample_from({{-0.5}, {0.5}, {10.0}});
  const double x[] = {0.0};
  EXPECT_NEAR(nu_hat(s, k, x).value, 1.0 / 3.0, 1e-15);
  const auto one = sample_from({{0.2, -0.1}});
  const ProductKernel k2(make_order_kernel(4), {0.5, 0.25});
  const double y[] = {0.2, -0.1};
  EXPECT_DOUBLE_EQ(nu_hat(one, k2, y).value, k2.base()(0.0) * k2.base()(0.0) / (0.5 * 0.25));
  const double far[] = {50.0, 50.0};
  EXPECT_EQ(nu_hat(one, k2, far).value, 0.0);
}

TEST(NuHat, TranslationInvariantAndNormalised) {
  const auto latent = simulate_ou_exact(0.5, 1, {400, 0.05, 0.0, 21});
  const auto s = preaverage(add_noise(latent, 0.3, 4), 3);
  const ProductKernel k(make_order_kernel(4), {0.4});
  auto shifted = s;
  for (std::size_t i = 0; i < shifted.count(); ++i) shifted.blocks.at(i, 0) += 1.25;
  for (double x = -2.0; x <= 2.0; x += 0.37) {
    const double a[] = {x};
    const double b[] = {x + 1.25};
    EXPECT_NEAR(nu_hat(s, k, a).value, nu_hat(shifted, k, b).value, 1e-12);
  }
  double lo = 1e9;
  double hi = -1e9;
  for (std::size_t i = 0; i < s.count(); ++i) {
    lo = std::min(lo, s.blocks.at(i, 0));
    hi = std::max(hi, s.blocks.at(i, 0));
  }
  // The estimate is piecewise polynomial of degree 2 between block +- h knots;
  // a fine midpoint sum over the covering interval is accurate well below 1e-6.
  double mass = 0.0;
  const double step = 1e-4;
  for (double x = lo - 0.5 + step / 2; x < hi + 0.5; x += step) mass += nu_hat(s, k, std::span<const double>(&x, 1)).value * step;
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(MuHat, ReducesToNuHat) {
  const auto latent = simulate_ou_exact(0.5, 2, {300, 0.05, 0.0, 2});
  const auto s = preaverage(add_noise(latent, 0.5, 6), 2);
  const ProductKernel k(make_order_kernel(2), {0.5, 0.7});
  const double x[] = {0.1, -0.2};
  EXPECT_EQ(mu_hat(s, k, debias_weights(1), x).value, nu_hat(s, k, x).value);
  auto flat = s;
  flat.tau_tilde = 0.0;
  EXPECT_NEAR(mu_hat(flat, k, debias_weights(3), x).value, nu_hat(flat, k, x).value, 1e-12);
}

TEST(MuHat, MatchesExplicitShiftedSum) {
  const auto latent = simulate_ou_exact(0.5, 1, {500, 0.05, 0.0, 8});
  const auto s = preaverage(add_noise(latent, 0.6, 3), 4);
  const ProductKernel k(make_order_kernel(2), {0.3});
  const double t = s.tau_tilde;
  for (double x : {-0.7, 0.0, 0.4}) {
    const double a[] = {x};
    const double b[] = {x + t};
    const double c[] = {x + 2.0 * t};
    const double manual = 0.5 * nu_hat(s, k, a).value + nu_hat(s, k, b).value - 0.5 * nu_hat(s, k, c).value;
    EXPECT_NEAR(mu_hat(s, k, debias_weights(2), a).value, manual, 1e-12);
  }
}

TEST(MuHat, SharedWorkEqualsMultiIndexSum) {
  const auto latent = simulate_ou_exact(0.5, 3, {200, 0.05, 0.0, 12});
  const auto s = preaverage(add_noise(latent, 0.4, 3), 2);
  const ProductKernel k(make_order_kernel(2), {0.6, 0.8, 0.9});
  const auto w = debias_weights(3);
  const double x[] = {0.1, -0.3, 0.2};
  double manual = 0.0;
  const auto& u = w.values();
  for (int g0 = 0; g0 <= 3; ++g0) {
    for (int g1 = 0; g1 <= 3; ++g1) {
      for (int g2 = 0; g2 <= 3; ++g2) {
        const double y[] = {x[0] + g0 * s.tau_tilde, x[1] + g1 * s.tau_tilde, x[2] + g2 * s.tau_tilde};
        manual += u[g0] * u[g1] * u[g2] * nu_hat(s, k, y).value;
      }
    }
  }
  EXPECT_NEAR(mu_hat(s, k, w, x).value, manual, 1e-12);
}

TEST(MuHat, RefusesTooManyShiftedPoints) {
  const std::size_t d = 6;
  const auto s = sample_from({std::vector<double>(d, 0.0)}, 0.1);
  const ProductKernel k(make_order_kernel(1), std::vector<double>(d, 1.0));
  const std::vector<double> x(d, 0.0);
  EXPECT_NO_THROW(mu_hat(s, k, debias_weights(9), x));
  EXPECT_THROW(mu_hat(s, k, debias_weights(10), x), DimensionalityError);
}

TEST(NaiveKb, EqualsUnitBlockEstimator) {
  const auto latent = simulate_ou_exact(0.5, 1, {300, 0.05, 0.0, 5});
  const auto s = add_noise(latent, 0.8, 1);
  const ProductKernel k(make_order_kernel(1), {0.25});
  const auto blocks = preaverage(s, 1);
  for (double x : {-1.0, 0.0, 0.6}) {
    const double a[] = {x};
    EXPECT_EQ(naive_kb(s, k, a).value, nu_hat(blocks, k, a).value);
  }
  const double far[] = {1e3};
  EXPECT_EQ(naive_kb(s, k, far).value, 0.0);
}

TEST(SmoothedTarget, GaussianClosedForm) {
  const auto model = DiffusionModel::ornstein_uhlenbeck(0.5, 1);
  const double zero[] = {0.0};
  EXPECT_NEAR(smoothed_target(model, 0.5, zero), 0.356825, 1e-6);
  EXPECT_NEAR(smoothed_target(model, 0.5, zero), normal_pdf(0.0, 1.25), 1e-12);
  EXPECT_EQ(smoothed_target(model, 0.0, zero), model.density(zero));
  const auto lc = DiffusionModel::log_cosh(0.5, 1);
  for (double x : {0.3, 1.1}) {
    const double a[] = {x};
    const double b[] = {-x};
    EXPECT_NEAR(smoothed_target(lc, 0.4, a), smoothed_target(lc, 0.4, b), 1e-12);
  }
  DiffusionModel::Parts parts;
  parts.dim = 1;
  parts.drift = [](std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
  parts.potential = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
  parts.minimizer = {0.0};
  EXPECT_THROW(smoothed_target(DiffusionModel(parts), 0.3, zero), UnsupportedError);
}

TEST(Debiasing, BeatsRawSmoothingOnGaussianTarget) {
  const auto model = DiffusionModel::ornstein_uhlenbeck(0.5, 1);
  const auto weights = debias_weights(2);
  const auto& u = weights.values();
  for (double t : {0.2, 0.3, 0.5}) {
    for (double x : {0.0, 0.5, 1.0}) {
      double debiased = 0.0;
      for (int g = 0; g <= 2; ++g) {
        const double y[] = {x + g * t};
        debiased += u[g] * smoothed_target(model, t, y);
      }
      const double a[] = {x};
      const double truth = model.density(a);
      EXPECT_LT(std::abs(debiased - truth), std::abs(smoothed_target(model, t, a) - truth)) << t << " " << x;
    }
  }
}

TEST(Debiasing, MatchesClosedFormGaussianConvolution) {
  const auto model = DiffusionModel::ornstein_uhlenbeck(0.5, 1);
  const auto weights = debias_weights(2);
  const auto& u = weights.values();
  auto normal = [](double x, double var) { return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * std::acos(-1.0) * var); };
  for (double t : {0.2, 0.3, 0.5}) {
    for (double x : {0.0, 0.5, 1.0}) {
      double debiased = 0.0;
      double closed = 0.0;
      for (int g = 0; g <= 2; ++g) {
        const double y[] = {x + g * t};
        EXPECT_NEAR(smoothed_target(model, t, y), normal(y[0], 1.0 + t * t), 1e-12);
        debiased += u[g] * smoothed_target(model, t, y);
        closed += u[g] * normal(y[0], 1.0 + t * t);
      }
      EXPECT_NEAR(debiased, closed, 1e-12);
    }
  }
}
