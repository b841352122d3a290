#include <cmath>

#include <gtest/gtest.h>

#include "invdens/diffusion.hpp"
#include "invdens/error.hpp"
#include "invdens/preaverage.hpp"

using namespace invdens;

namespace {

ObservationSeries series_from(const std::vector<double>& y, double delta = 0.1) {
  ObservationSeries s;
  s.scheme = {y.size() - 1, delta, 0.0, 0};
  s.latent = PointSet(1, y.size());
  s.observed = PointSet(1, y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    s.latent.at(i, 0) = y[i];
    s.observed.at(i, 0) = y[i];
  }
  return s;
}

} // namespace

TEST(EffectiveNoise, HandValues) {
  EXPECT_EQ(effective_noise(0.7, 0.3, 1), 0.7);
  EXPECT_NEAR(effective_noise(0.0, 0.12, 2), std::sqrt(0.015), 1e-15);
  EXPECT_NEAR(effective_noise(0.0, 0.12, 2), 0.1224745, 1e-7);
  EXPECT_NEAR(effective_noise(1.0, std::ldexp(1.0, -7), 11), 0.321463, 1e-6);
  EXPECT_THROW(effective_noise(1.0, 0.1, 0), ParameterError);
}

TEST(EffectiveNoise, Monotonicity) {
  double prev = 0.0;
  for (std::size_t p = 1; p <= 64; ++p) {
    const double v = effective_noise(0.0, 0.01, p);
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 2.0;
  for (std::size_t p = 1; p <= 64; ++p) {
    const double v = effective_noise(1.0, 0.0, p);
    EXPECT_DOUBLE_EQ(v, 1.0 / std::sqrt(static_cast<double>(p)));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Preaverage, BlockMeansAndRemainder) {
  const auto s = series_from({0.0, 2.0, 4.0, 6.0, 8.0});
  const auto a = preaverage(s, 2);
  ASSERT_EQ(a.count(), 2u);
  EXPECT_EQ(a.blocks.at(0, 0), 1.0);
  EXPECT_EQ(a.blocks.at(1, 0), 5.0);
  const auto odd = series_from({0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  EXPECT_EQ(preaverage(odd, 2).count(), 2u);
}

TEST(Preaverage, IdentityForUnitBlocks) {
  const auto latent = simulate_ou_exact(0.5, 2, {100, 0.1, 0.0, 3});
  const auto s = add_noise(latent, 0.4, 1);
  const auto a = preaverage(s, 1);
  ASSERT_EQ(a.count(), 100u);
  EXPECT_EQ(a.tau_tilde, 0.4);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(a.blocks.at(i, 0), s.observed.at(i, 0));
    EXPECT_EQ(a.blocks.at(i, 1), s.observed.at(i, 1));
  }
}

TEST(Preaverage, MeanOfBlocksAndTranslation) {
  const auto latent = simulate_ou_exact(0.5, 1, {120, 0.1, 0.0, 9});
  const auto s = add_noise(latent, 1.0, 2);
  const auto a = preaverage(s, 6);
  double raw = 0.0;
  for (std::size_t i = 0; i < 120; ++i) raw += s.observed.at(i, 0);
  double blocks = 0.0;
  for (std::size_t k = 0; k < a.count(); ++k) blocks += a.blocks.at(k, 0);
  EXPECT_NEAR(blocks / a.count(), raw / 120.0, 1e-13);

  auto shifted = s;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted.observed.at(i, 0) += 3.5;
  const auto b = preaverage(shifted, 6);
  for (std::size_t k = 0; k < a.count(); ++k) EXPECT_NEAR(b.blocks.at(k, 0) - 3.5, a.blocks.at(k, 0), 1e-13);
}

TEST(Preaverage, ErrorsAndWarnings) {
  const auto s = series_from({0.0, 1.0, 2.0, 3.0}, 0.25);
  EXPECT_THROW(preaverage(s, 0), ParameterError);
  EXPECT_THROW(preaverage(s, 4 + 1), ParameterError);
  EXPECT_TRUE(preaverage(s, 2).warnings.empty());
  EXPECT_FALSE(preaverage(s, 3).warnings.empty());
  EXPECT_EQ(max_trusted_block_size(0.25), 2u);
  EXPECT_EQ(max_trusted_block_size(std::ldexp(1.0, -7)), 12u);
}
