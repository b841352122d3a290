#include "invdens/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "invdens/csv.hpp"
#include "invdens/rng.hpp"

namespace invdens {

namespace {

constexpr std::uint64_t kLatentStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::size_t kGradientProbes = 16;

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

std::vector<std::string> check_gradient(const DiffusionModel::Parts& parts) {
  std::vector<std::string> warnings;
  Stream rng(0xC0FFEE, 0);
  Point x(parts.dim);
  Point b(parts.dim);
  Point shifted(parts.dim);
  for (std::size_t probe = 0; probe < kGradientProbes; ++probe) {
    for (std::size_t i = 0; i < parts.dim; ++i) {
      const double centre = parts.minimizer.empty() ? 0.0 : parts.minimizer[i];
      x[i] = centre + 2.0 * rng.normal();
    }
    parts.drift(x, b);
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < parts.dim; ++i) {
      const double step = 1e-5 * std::max(1.0, std::abs(x[i]));
      shifted = x;
      shifted[i] = x[i] + step;
      const double up = parts.potential(shifted);
      shifted[i] = x[i] - step;
      const double down = parts.potential(shifted);
      const double fd = (up - down) / (2.0 * step);
      if (!(std::abs(fd + b[i]) <= 1e-5 * scale)) {
        std::ostringstream msg;
        msg << "drift does not match -grad V in coordinate " << i << " (finite difference " << fd
            << ", drift " << b[i] << ")";
        warnings.push_back(msg.str());
        return warnings;
      }
    }
  }
  return warnings;
}

} // namespace

DiffusionModel::DiffusionModel(Parts parts) : parts_(std::move(parts)) {
  if (parts_.dim == 0) throw ParameterError("model dimension must be positive");
  if (!parts_.drift || !parts_.potential) throw ParameterError("model needs drift and potential");
  if (parts_.minimizer.empty()) parts_.minimizer.assign(parts_.dim, 0.0);
  if (parts_.minimizer.size() != parts_.dim) throw ParameterError("minimizer has wrong dimension");
  if (!parts_.marginals.empty() && parts_.marginals.size() != parts_.dim) {
    throw ParameterError("one marginal density per coordinate is required");
  }
  warnings_ = check_gradient(parts_);
}

double DiffusionModel::density(std::span<const double> x) const {
  if (!parts_.density) throw UnsupportedError("model has no analytic invariant density");
  return (*parts_.density)(x);
}

DiffusionModel DiffusionModel::ornstein_uhlenbeck(double theta, std::size_t dim) {
  if (!(theta > 0.0)) throw ParameterError("OU rate theta must be positive");
  Parts parts;
  parts.dim = dim;
  parts.name = "ou";
  parts.drift = [theta](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -theta * x[i];
  };
  parts.potential = [theta](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * theta * s;
  };
  const double norm = std::sqrt(theta / std::numbers::pi);
  Density1D marginal = [theta, norm](double y) { return norm * std::exp(-theta * y * y); };
  parts.marginals.assign(dim, marginal);
  parts.density = [marginal](std::span<const double> x) {
    double v = 1.0;
    for (double y : x) v *= marginal(y);
    return v;
  };
  parts.ou_theta = theta;
  parts.bounds = {0.0, theta * static_cast<double>(dim), 0.0};
  return DiffusionModel(std::move(parts));
}

DiffusionModel DiffusionModel::log_cosh(double curvature, std::size_t dim) {
  if (!(curvature > 0.0)) throw ParameterError("log-cosh curvature must be positive");
  Parts parts;
  parts.dim = dim;
  parts.name = "logcosh";
  parts.drift = [curvature](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -std::tanh(x[i]) - curvature * x[i];
  };
  parts.potential = [curvature](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += invdens::log_cosh(v) + 0.5 * curvature * v * v;
    return s;
  };
  auto unnormalized = [curvature](double y) {
    return std::exp(-2.0 * invdens::log_cosh(y) - curvature * y * y);
  };
  const double z = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      unnormalized, -std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity(), 15, 1e-14);
  Density1D marginal = [unnormalized, z](double y) { return unnormalized(y) / z; };
  parts.marginals.assign(dim, marginal);
  parts.density = [marginal](std::span<const double> x) {
    double v = 1.0;
    for (double y : x) v *= marginal(y);
    return v;
  };
  parts.bounds = {0.0, (1.0 + curvature) * static_cast<double>(dim), 0.0};
  return DiffusionModel(std::move(parts));
}

void ObservationScheme::validate() const {
  if (n < 1) throw ParameterError("observation count n must be at least 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError("sampling interval delta must be positive");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ParameterError("noise level tau must be >= 0");
}

OuTransition ou_transition(double theta, double dt) {
  if (!(theta > 0.0)) throw ParameterError("OU rate theta must be positive");
  if (!(dt >= 0.0)) throw ParameterError("OU time step must be non-negative");
  // -expm1 keeps the variance accurate for small theta * dt.
  return {std::exp(-theta * dt), std::sqrt(-std::expm1(-2.0 * theta * dt) / (2.0 * theta))};
}

ObservationSeries simulate_ou_exact(double theta, std::size_t dim, const ObservationScheme& scheme,
                                    const InitialCondition& init) {
  scheme.validate();
  const OuTransition step = ou_transition(theta, scheme.delta);
  ObservationSeries series{scheme, PointSet(dim, scheme.n + 1), PointSet()};
  Stream rng(scheme.seed, kLatentStream);

  auto x0 = series.latent[0];
  if (init.kind == InitialCondition::Kind::kStationary) {
    const double sd = std::sqrt(1.0 / (2.0 * theta));
    for (auto& v : x0) v = sd * rng.normal();
  } else {
    if (init.x.size() != dim) throw ParameterError("initial point has wrong dimension");
    std::copy(init.x.begin(), init.x.end(), x0.begin());
  }
  for (std::size_t i = 0; i < scheme.n; ++i) {
    auto prev = series.latent[i];
    auto next = series.latent[i + 1];
    for (std::size_t c = 0; c < dim; ++c) next[c] = step.decay * prev[c] + step.stddev * rng.normal();
  }
  series.observed = series.latent;
  return series;
}

double burn_in_time(double horizon) noexcept { return std::max(10.0, 0.1 * horizon); }

ObservationSeries simulate_euler(const DiffusionModel& model, const ObservationScheme& scheme,
                                 std::size_t substeps, const InitialCondition& init) {
  scheme.validate();
  if (substeps < 1) throw ParameterError("substeps must be at least 1");
  const std::size_t dim = model.dim();
  const double dt = scheme.delta / static_cast<double>(substeps);
  const double sqrt_dt = std::sqrt(dt);
  Stream rng(scheme.seed, kLatentStream);

  Point x(dim);
  Point comp(dim, 0.0); // Kahan compensation per coordinate
  Point b(dim);

  auto advance = [&](std::size_t index) {
    model.drift(x, b);
    for (std::size_t c = 0; c < dim; ++c) {
      if (!std::isfinite(b[c])) throw SimulationError(index, "drift evaluation is not finite");
      const double increment = b[c] * dt + sqrt_dt * rng.normal() - comp[c];
      const double sum = x[c] + increment;
      comp[c] = (sum - x[c]) - increment;
      x[c] = sum;
    }
  };

  if (init.kind == InitialCondition::Kind::kStationary) {
    x = model.minimizer();
    const auto burn_steps =
        static_cast<std::size_t>(std::ceil(burn_in_time(scheme.horizon()) / dt));
    for (std::size_t k = 0; k < burn_steps; ++k) advance(0);
  } else {
    if (init.x.size() != dim) throw ParameterError("initial point has wrong dimension");
    x = init.x;
  }
  std::fill(comp.begin(), comp.end(), 0.0);

  ObservationSeries series{scheme, PointSet(dim, scheme.n + 1), PointSet()};
  std::copy(x.begin(), x.end(), series.latent[0].begin());
  for (std::size_t i = 1; i <= scheme.n; ++i) {
    for (std::size_t k = 0; k < substeps; ++k) advance(i);
    std::copy(x.begin(), x.end(), series.latent[i].begin());
  }
  series.observed = series.latent;
  return series;
}

ObservationSeries add_noise(const ObservationSeries& latent, double tau, std::uint64_t seed) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ParameterError("noise level tau must be >= 0");
  if (!latent.observed.empty() && !(latent.observed == latent.latent)) {
    throw ParameterError("series already carries measurement noise");
  }
  ObservationSeries out = latent;
  out.scheme.tau = tau;
  out.observed = latent.latent;
  if (tau == 0.0) return out;
  Stream rng(seed, kNoiseStream);
  for (auto& v : out.observed.data()) v += tau * rng.normal();
  return out;
}

void write_series_csv(const ObservationSeries& series, std::ostream& out) {
  const std::size_t d = series.dim();
  out << "t";
  for (std::size_t c = 1; c <= d; ++c) out << ",x_" << c;
  for (std::size_t c = 1; c <= d; ++c) out << ",y_" << c;
  out << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_g17(static_cast<double>(i) * series.scheme.delta);
    for (double v : series.latent[i]) out << ',' << format_g17(v);
    for (double v : series.observed[i]) out << ',' << format_g17(v);
    out << '\n';
  }
}

ObservationSeries read_series_csv(std::istream& in, double tau) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.size() < 3 || header[0] != "t" || (header.size() - 1) % 2 != 0) {
    throw IoError("series CSV must start with a header t,x_1..x_d,y_1..y_d");
  }
  const std::size_t d = (header.size() - 1) / 2;
  std::vector<double> times;
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    ++row;
    if (fields.size() != header.size()) {
      throw IoError("series CSV row " + std::to_string(row) + " has the wrong field count");
    }
    times.push_back(parse_double(fields[0]));
    for (std::size_t c = 0; c < d; ++c) xs.push_back(parse_double(fields[1 + c]));
    for (std::size_t c = 0; c < d; ++c) ys.push_back(parse_double(fields[1 + d + c]));
  }
  if (times.size() < 2) throw IoError("series CSV needs at least two observations");
  ObservationScheme scheme;
  scheme.n = times.size() - 1;
  scheme.delta = times[1] - times[0];
  scheme.tau = tau;
  scheme.validate();
  ObservationSeries series{scheme, PointSet(d, times.size()), PointSet(d, times.size())};
  std::copy(xs.begin(), xs.end(), series.latent.data().begin());
  std::copy(ys.begin(), ys.end(), series.observed.data().begin());
  return series;
}

} // namespace invdens
