#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invdens/points.hpp"

namespace invdens {

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;
using ScalarField = std::function<double(std::span<const double>)>;
using Density1D = std::function<double(double)>;

struct DriftBounds {
  std::optional<double> b0;
  std::optional<double> b1;
  std::optional<double> v0;
};

/// Gradient diffusion dX = b(X) dt + dW with b = -grad V and unit diffusion
/// coefficient. Immutable after construction.
class DiffusionModel {
public:
  struct Parts {
    std::size_t dim = 1;
    VectorField drift;
    ScalarField potential;
    std::optional<ScalarField> density;
    /// Per-coordinate marginals when the invariant density factorizes.
    std::vector<Density1D> marginals;
    std::optional<double> ou_theta;
    Point minimizer;
    DriftBounds bounds;
    std::string name = "custom";
  };

  explicit DiffusionModel(Parts parts);

  /// V(x) = theta |x|^2 / 2, invariant law N(0, I / (2 theta)).
  static DiffusionModel ornstein_uhlenbeck(double theta, std::size_t dim);

  /// V(x) = sum_i log cosh(x_i) + curvature x_i^2 / 2. Non-Gaussian product
  /// invariant density, Lipschitz drift.
  static DiffusionModel log_cosh(double curvature, std::size_t dim);

  std::size_t dim() const noexcept { return parts_.dim; }
  const std::string& name() const noexcept { return parts_.name; }

  void drift(std::span<const double> x, std::span<double> out) const { parts_.drift(x, out); }
  double potential(std::span<const double> x) const { return parts_.potential(x); }

  bool has_density() const noexcept { return parts_.density.has_value(); }
  double density(std::span<const double> x) const;
  bool has_marginals() const noexcept { return !parts_.marginals.empty(); }
  const std::vector<Density1D>& marginals() const noexcept { return parts_.marginals; }

  std::optional<double> ou_theta() const noexcept { return parts_.ou_theta; }
  const Point& minimizer() const noexcept { return parts_.minimizer; }
  const DriftBounds& bounds() const noexcept { return parts_.bounds; }

  /// Advisory findings of the construction-time gradient check.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
  Parts parts_;
  std::vector<std::string> warnings_;
};

struct ObservationScheme {
  std::size_t n = 1;
  double delta = 1.0;
  double tau = 0.0;
  std::uint64_t seed = 0;

  double horizon() const noexcept { return static_cast<double>(n) * delta; }
  void validate() const;
};

/// Latent states X_0..X_n and observations Y_0..Y_n on the grid i * delta.
struct ObservationSeries {
  ObservationScheme scheme;
  PointSet latent;
  PointSet observed;

  std::size_t dim() const noexcept { return latent.dim(); }
  std::size_t size() const noexcept { return latent.size(); }
};

struct InitialCondition {
  enum class Kind { kStationary, kFixed };
  Kind kind = Kind::kStationary;
  Point x;

  static InitialCondition stationary() { return {}; }
  static InitialCondition fixed(Point x) { return {Kind::kFixed, std::move(x)}; }
};

/// One-step transition of the OU process dX = -theta X dt + dW over dt >= 0.
struct OuTransition {
  double decay;
  double stddev;
};
OuTransition ou_transition(double theta, double dt);

/// Exact OU sampling, componentwise. Observed equals latent.
ObservationSeries simulate_ou_exact(double theta, std::size_t dim, const ObservationScheme& scheme,
                                    const InitialCondition& init = InitialCondition::stationary());

/// Euler-Maruyama with internal step delta / substeps. A stationary start runs a
/// burn-in of max(10, 0.1 T) time units from the potential minimizer.
ObservationSeries simulate_euler(const DiffusionModel& model, const ObservationScheme& scheme,
                                 std::size_t substeps,
                                 const InitialCondition& init = InitialCondition::stationary());

/// Burn-in length used for a stationary Euler start.
double burn_in_time(double horizon) noexcept;

/// Y_i = X_i + tau xi_i. Requires the input to be noise-free.
ObservationSeries add_noise(const ObservationSeries& latent, double tau, std::uint64_t seed);

void write_series_csv(const ObservationSeries& series, std::ostream& out);
/// Reads the `t,x_1..x_d,y_1..y_d` layout. delta is taken from the time column.
ObservationSeries read_series_csv(std::istream& in, double tau);

} // namespace invdens
