#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "invdens/csv.hpp"
#include "invdens/diffusion.hpp"
#include "invdens/error.hpp"
#include "invdens/rng.hpp"

using namespace invdens;

namespace {

double mean_of(const PointSet& s, std::size_t c = 0) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m += s.at(i, c);
  return m / static_cast<double>(s.size());
}

double var_of(const PointSet& s, std::size_t c = 0) {
  const double m = mean_of(s, c);
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) v += (s.at(i, c) - m) * (s.at(i, c) - m);
  return v / static_cast<double>(s.size());
}

} // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Stream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
}

TEST(Rng, UniformInOpenIntervalAndNormalMoments) {
  Stream s(7);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(OuTransition, ConditionalVarianceAndDegenerateStep) {
  const auto t = ou_transition(0.5, std::ldexp(1.0, -7));
  EXPECT_NEAR(t.stddev * t.stddev, 1.0 - std::exp(-std::ldexp(1.0, -7)), 1e-15);
  EXPECT_NEAR(t.stddev * t.stddev, 7.7820e-3, 1e-7);
  const auto z = ou_transition(0.5, 0.0);
  EXPECT_EQ(z.decay, 1.0);
  EXPECT_EQ(z.stddev, 0.0);
  EXPECT_THROW(ou_transition(0.0, 0.1), ParameterError);
  EXPECT_THROW(ou_transition(0.5, -0.1), ParameterError);
}

TEST(SimulateOuExact, StationaryMomentsAndShape) {
  ObservationScheme scheme{100000, 0.05, 0.0, 11};
  const auto s = simulate_ou_exact(0.5, 1, scheme);
  ASSERT_EQ(s.latent.size(), scheme.n + 1);
  ASSERT_EQ(s.observed.size(), scheme.n + 1);
  EXPECT_EQ(s.latent, s.observed);
  // Autocorrelated path: effective sample size about T / (2 * correlation time).
  const double ess = scheme.horizon() / 4.0;
  EXPECT_NEAR(mean_of(s.latent), 0.0, 3.0 / std::sqrt(ess));
  EXPECT_NEAR(var_of(s.latent), 1.0, 3.0 * std::sqrt(2.0 / ess));
}

TEST(SimulateOuExact, RejectsBadInput) {
  EXPECT_THROW(simulate_ou_exact(-1.0, 1, {10, 0.1, 0.0, 1}), ParameterError);
  EXPECT_THROW(simulate_ou_exact(1.0, 1, {10, 0.0, 0.0, 1}), ParameterError);
}

TEST(SimulateOuExact, FixedStartAndDeterminism) {
  ObservationScheme scheme{50, 0.1, 0.0, 5};
  const auto a = simulate_ou_exact(0.5, 2, scheme, InitialCondition::fixed({1.0, -1.0}));
  const auto b = simulate_ou_exact(0.5, 2, scheme, InitialCondition::fixed({1.0, -1.0}));
  EXPECT_EQ(a.latent.at(0, 0), 1.0);
  EXPECT_EQ(a.latent.at(0, 1), -1.0);
  EXPECT_EQ(a.latent, b.latent);
}

TEST(SimulateEuler, ZeroDriftIsBrownian) {
  DiffusionModel::Parts parts;
  parts.dim = 1;
  parts.drift = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  parts.potential = [](std::span<const double>) { return 0.0; };
  parts.minimizer = {0.0};
  const DiffusionModel bm(parts);
  ObservationScheme scheme{20000, 0.25, 0.0, 3};
  const auto s = simulate_euler(bm, scheme, 1, InitialCondition::fixed({0.0}));
  double sq = 0.0;
  for (std::size_t i = 0; i < scheme.n; ++i) {
    const double dx = s.latent.at(i + 1, 0) - s.latent.at(i, 0);
    sq += dx * dx;
  }
  EXPECT_NEAR(sq / static_cast<double>(scheme.n), 0.25, 0.25 * 4.0 * std::sqrt(2.0 / scheme.n));
}

TEST(SimulateEuler, MarginalVarianceMatchesExactSampler) {
  const auto model = DiffusionModel::ornstein_uhlenbeck(0.5, 1);
  const double delta = std::ldexp(1.0, -7);
  const std::size_t steps = 1280; // time 10
  const int reps = 10000;
  double ve = 0.0;
  double vx = 0.0;
  for (int r = 0; r < reps; ++r) {
    ObservationScheme scheme{steps, delta, 0.0, derive_seed(99, r)};
    const auto e = simulate_euler(model, scheme, 8, InitialCondition::fixed({0.0}));
    const auto x = simulate_ou_exact(0.5, 1, scheme, InitialCondition::fixed({0.0}));
    ve += e.latent.at(steps, 0) * e.latent.at(steps, 0);
    vx += x.latent.at(steps, 0) * x.latent.at(steps, 0);
  }
  ve /= reps;
  vx /= reps;
  const double exact = 1.0 - std::exp(-10.0);
  EXPECT_NEAR(vx, exact, 0.05);
  EXPECT_NEAR(ve / vx, 1.0, 0.02);
}

TEST(SimulateEuler, DiscretisationErrorShrinksWithSubsteps) {
  // Far from equilibrium the drift dominates: the mean at t = 4 from x0 = 20
  // is 20 exp(-2) exactly, while one Euler step per 0.5 gives 20 * 0.75^8.
  const auto model = DiffusionModel::ornstein_uhlenbeck(0.5, 1);
  const int reps = 400;
  double coarse = 0.0;
  double fine = 0.0;
  for (int r = 0; r < reps; ++r) {
    ObservationScheme s{8, 0.5, 0.0, derive_seed(5, r)};
    coarse += simulate_euler(model, s, 1, InitialCondition::fixed({20.0})).latent.at(8, 0);
    fine += simulate_euler(model, s, 16, InitialCondition::fixed({20.0})).latent.at(8, 0);
  }
  const double truth = 20.0 * std::exp(-2.0);
  const double err_coarse = std::abs(coarse / reps - truth);
  const double err_fine = std::abs(fine / reps - truth);
  EXPECT_NEAR(err_coarse, truth - 20.0 * std::pow(0.75, 8), 0.15);
  EXPECT_LT(err_fine, err_coarse / 4.0);
}

TEST(SimulateEuler, NonFiniteDriftReportsIndex) {
  DiffusionModel::Parts parts;
  parts.dim = 1;
  parts.drift = [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  parts.potential = [](std::span<const double> x) { return -x[0]; };
  parts.minimizer = {0.0};
  const DiffusionModel m(parts);
  try {
    simulate_euler(m, {100, 0.1, 0.0, 1}, 1, InitialCondition::fixed({0.0}));
    FAIL() << "expected a simulation error";
  } catch (const SimulationError& e) {
    EXPECT_GT(e.index(), 0u);
    EXPECT_LT(e.index(), 100u);
  }
}

TEST(DiffusionModel, GradientCheckWarnsOnInconsistentDrift) {
  DiffusionModel::Parts parts;
  parts.dim = 1;
  parts.drift = [](std::span<const double> x, std::span<double> out) { out[0] = x[0]; };
  parts.potential = [](std::span<const double> x) { return x[0] * x[0]; };
  parts.minimizer = {0.0};
  EXPECT_FALSE(DiffusionModel(parts).warnings().empty());
  EXPECT_TRUE(DiffusionModel::ornstein_uhlenbeck(0.5, 3).warnings().empty());
  EXPECT_TRUE(DiffusionModel::log_cosh(1.0, 2).warnings().empty());
}

TEST(DiffusionModel, DensitiesIntegrateToOne) {
  for (const auto& model : {DiffusionModel::ornstein_uhlenbeck(0.5, 1), DiffusionModel::log_cosh(0.7, 1)}) {
    double s = 0.0;
    const double h = 1e-3;
    for (double x = -12.0; x <= 12.0; x += h) s += model.density(std::span<const double>(&x, 1)) * h;
    EXPECT_NEAR(s, 1.0, 1e-3) << model.name();
  }
  const auto ou = DiffusionModel::ornstein_uhlenbeck(0.5, 2);
  const double zero[] = {0.0, 0.0};
  EXPECT_NEAR(ou.density(zero), 1.0 / (2.0 * std::acos(-1.0)), 1e-15);
}

TEST(AddNoise, ZeroNoiseCopiesAndNoiseHasUnitVariance) {
  ObservationScheme scheme{100000, 0.01, 0.0, 8};
  const auto latent = simulate_ou_exact(0.5, 1, scheme);
  const auto same = add_noise(latent, 0.0, 1);
  EXPECT_EQ(same.observed, latent.latent);
  const auto noisy = add_noise(latent, 1.0, 1);
  const auto again = add_noise(latent, 1.0, 1);
  EXPECT_EQ(noisy.observed, again.observed);
  EXPECT_EQ(noisy.scheme.tau, 1.0);
  double sum = 0.0;
  double sq = 0.0;
  double cross = 0.0;
  const double n = static_cast<double>(latent.size());
  for (std::size_t i = 0; i < latent.size(); ++i) {
    const double e = noisy.observed.at(i, 0) - latent.latent.at(i, 0);
    sum += e;
    sq += e * e;
    cross += e * latent.latent.at(i, 0);
  }
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0, 0.01);
  EXPECT_LT(std::abs(cross / n), 3.0 / std::sqrt(n));
  EXPECT_THROW(add_noise(latent, -1.0, 1), ParameterError);
  EXPECT_THROW(add_noise(noisy, 1.0, 2), ParameterError);
}

TEST(SeriesCsv, RoundTripsAtFullPrecision) {
  const auto latent = simulate_ou_exact(0.5, 2, {20, 0.125, 0.0, 4});
  const auto s = add_noise(latent, 0.3, 9);
  std::stringstream buf;
  write_series_csv(s, buf);
  std::string header;
  std::getline(std::stringstream(buf.str()), header);
  EXPECT_EQ(header, "t,x_1,x_2,y_1,y_2");
  const auto back = read_series_csv(buf, 0.3);
  EXPECT_EQ(back.latent, s.latent);
  EXPECT_EQ(back.observed, s.observed);
  EXPECT_EQ(back.scheme.n, s.scheme.n);
  EXPECT_DOUBLE_EQ(back.scheme.delta, 0.125);
}

TEST(SeriesCsv, RejectsGarbage) {
  std::stringstream bad("t,x_1,y_1\n0,1,abc\n");
  EXPECT_THROW(read_series_csv(bad, 0.0), IoError);
}

TEST(Csv, FormattingAndParsing) {
  EXPECT_EQ(format_shortest(0.1), "0.1");
  EXPECT_EQ(parse_double(format_shortest(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(parse_double(format_g17(std::acos(-1.0))), std::acos(-1.0));
  EXPECT_THROW(parse_double("1.5x"), IoError);
  const auto f = split_csv_line("a,b,,c\r");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[2], "");
  EXPECT_EQ(timestamp_line().rfind("# generated ", 0), 0u);
}
