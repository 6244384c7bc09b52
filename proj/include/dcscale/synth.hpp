#pragma once

// Seeded synthetic processes used as oracles for the event clock and the
// fitters.
//
// Randomness is pinned: std::mt19937_64 (its output sequence is fixed by the
// C++ standard), uniforms in (0, 1) from the top 53 bits, standard normals by
// the Marsaglia polar method. std:: distributions are not used because their
// algorithms are implementation-defined.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "dcscale/core.hpp"

namespace dcscale {

enum class GeneratorKind : std::uint8_t {
  ArithmeticRandomWalk,
  GeometricBrownianMotion,
  Sawtooth,
  ParetoSamples,
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::GeometricBrownianMotion;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double start = 100.0;      // initial price
  double step = 0.01;        // random walk: absolute step size
  double sigma = 1e-4;       // GBM: per-step volatility
  double mu = 0.0;           // GBM: per-step drift
  double amplitude = 0.01;   // sawtooth: fractional swing
  double alpha = 2.5;        // Pareto: density exponent
  double x_min = 1.0;        // Pareto: lower bound
  TimestampMs start_time = 0;
  TimestampMs spacing_ms = 1000;
};

/// Uniform and normal variates from a pinned engine.
class VariateSource {
 public:
  explicit VariateSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

  bool coin() { return (engine_() >> 63) != 0; }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

namespace detail {

inline void validate(const GeneratorSpec& spec) {
  if (!(spec.start > 0.0)) throw DomainError("start price must be positive");
  if (spec.spacing_ms < 0) throw DomainError("timestamp spacing must be non-negative");
  switch (spec.kind) {
    case GeneratorKind::ArithmeticRandomWalk:
      if (!(spec.step > 0.0)) throw DomainError("random walk step must be positive");
      break;
    case GeneratorKind::GeometricBrownianMotion:
      if (!(spec.sigma >= 0.0) || !std::isfinite(spec.mu)) {
        throw DomainError("GBM needs sigma >= 0 and finite mu");
      }
      break;
    case GeneratorKind::Sawtooth:
      if (!(spec.amplitude > 0.0 && spec.amplitude < 1.0)) {
        throw DomainError("sawtooth amplitude must lie in (0, 1)");
      }
      break;
    case GeneratorKind::ParetoSamples:
      if (!(spec.alpha > 1.0) || !(spec.x_min > 0.0)) {
        throw DomainError("Pareto needs alpha > 1 and x_min > 0");
      }
      break;
  }
}

// Smallest representable move from `from` that is at least `amplitude` in
// fractional terms, in direction `sign`.
inline double exact_swing(double from, double amplitude, int sign) {
  double to = from * (1.0 + sign * amplitude);
  if (sign > 0) {
    while ((to - from) / from < amplitude) to = std::nextafter(to, std::numeric_limits<double>::infinity());
  } else {
    while ((to - from) / from > -amplitude) to = std::nextafter(to, 0.0);
  }
  return to;
}

}  // namespace detail

/// Price path of `spec.n` points, 1 second apart by default.
inline std::vector<PricePoint> generate_series(const GeneratorSpec& spec) {
  detail::validate(spec);
  if (spec.kind == GeneratorKind::ParetoSamples) {
    throw DomainError("Pareto samples are not a price series; use generate_pareto");
  }
  std::vector<PricePoint> out;
  out.reserve(spec.n);
  VariateSource rng(spec.seed);
  const double gbm_drift = spec.mu - spec.sigma * spec.sigma / 2.0;
  double price = spec.start;
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (i > 0) {
      switch (spec.kind) {
        case GeneratorKind::ArithmeticRandomWalk: {
          const bool up = rng.coin();
          // A step that would touch zero is redrawn; a fair redraw ends up.
          price = (up || price - spec.step <= 0.0) ? price + spec.step : price - spec.step;
          break;
        }
        case GeneratorKind::GeometricBrownianMotion:
          price *= std::exp(gbm_drift + spec.sigma * rng.normal());
          break;
        case GeneratorKind::Sawtooth:
          price = detail::exact_swing(price, spec.amplitude, i % 2 == 1 ? 1 : -1);
          break;
        case GeneratorKind::ParetoSamples:
          break;
      }
    }
    out.push_back({spec.start_time + static_cast<TimestampMs>(i) * spec.spacing_ms, price});
  }
  return out;
}

/// Inverse-CDF samples x = x_min * u^(-1 / (alpha - 1)); density ~ x^-alpha.
inline std::vector<double> generate_pareto(const GeneratorSpec& spec) {
  GeneratorSpec s = spec;
  s.kind = GeneratorKind::ParetoSamples;
  detail::validate(s);
  std::vector<double> out;
  out.reserve(spec.n);
  VariateSource rng(spec.seed);
  const double power = -1.0 / (spec.alpha - 1.0);
  for (std::size_t i = 0; i < spec.n; ++i) out.push_back(spec.x_min * std::pow(rng.uniform(), power));
  return out;
}

}  // namespace dcscale
