#pragma once

// Scaling-law estimation: log-log least squares for y = (x / C)^E, the
// DC-count and average-overshoot laws over a threshold grid, and tail
// exponents of power-law distributed samples.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dcscale/core.hpp"
#include "dcscale/dissect.hpp"

namespace dcscale {

class FitError : public Error {
 public:
  enum class Reason { Underdetermined, DegenerateExponent };

  FitError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

class ThresholdGrid {
 public:
  explicit ThresholdGrid(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
    if (thresholds_.empty()) throw DomainError("threshold grid is empty");
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
      const double h = thresholds_[i];
      if (!(h > 0.0 && h < 1.0)) throw DomainError("grid thresholds must lie in (0, 1)");
      if (i > 0 && !(h > thresholds_[i - 1])) {
        throw DomainError("grid thresholds must be strictly increasing");
      }
    }
  }

  /// `count` thresholds spaced evenly in log between `min` and `max` inclusive.
  static ThresholdGrid log_spaced(double min, double max, std::size_t count) {
    if (count < 2) throw DomainError("log-spaced grid needs at least 2 points");
    if (!(min > 0.0 && max > min)) throw DomainError("log-spaced grid needs 0 < min < max");
    std::vector<double> h(count);
    const double lo = std::log(min);
    const double step = (std::log(max) - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) h[i] = std::exp(lo + step * static_cast<double>(i));
    h.front() = min;
    h.back() = max;
    return ThresholdGrid(std::move(h));
  }

  /// 12 points from 0.05% to 5%.
  static ThresholdGrid default_grid() { return log_spaced(0.0005, 0.05, 12); }

  std::span<const double> values() const noexcept { return thresholds_; }
  std::size_t size() const noexcept { return thresholds_.size(); }
  double operator[](std::size_t i) const { return thresholds_[i]; }

 private:
  std::vector<double> thresholds_;
};

struct LawSample {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const LawSample&, const LawSample&) = default;
};

/// Ordinary least squares of ln y on ln x. Samples are sorted first, so the
/// result does not depend on input order.
inline ScalingFit fit_power_law(std::span<const LawSample> samples) {
  std::vector<LawSample> s(samples.begin(), samples.end());
  for (const auto& p : s) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) throw DomainError("power-law samples must be positive");
  }
  std::sort(s.begin(), s.end(),
            [](const LawSample& a, const LawSample& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (s.empty() || s.front().x == s.back().x) {
    throw FitError(FitError::Reason::Underdetermined, "underdetermined: fewer than 2 distinct x");
  }

  const double n = static_cast<double>(s.size());
  std::vector<double> lx(s.size()), ly(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    lx[i] = std::log(s[i].x);
    ly[i] = std::log(s[i].y);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  if (std::abs(slope) < 1e-12) {
    throw FitError(FitError::Reason::DegenerateExponent, "degenerate exponent: scale C undefined");
  }
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ss_res += r * r;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return {std::exp(-intercept / slope), slope, intercept, r2, s.size()};
}

enum class Law { DcCount, Overshoot };

inline const char* to_string(Law law) noexcept {
  return law == Law::DcCount ? "dc-count" : "overshoot";
}

struct LawOptions {
  std::size_t min_count = 10;  // DCs required at a threshold for it to enter the fit
  ReturnConvention convention = ReturnConvention::Fractional;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// One grid point's raw measurement.
struct GridPoint {
  double threshold = 0.0;
  EventTally tally;
};

struct LawFit {
  Law law = Law::DcCount;
  ScalingFit fit;
  std::vector<LawSample> samples;  // the points that entered the fit
  std::vector<GridPoint> grid;     // every threshold, fitted or not
};

/// Dissects `series` once per threshold. Thresholds are independent clocks
/// and are spread over worker threads; results land in grid order.
inline std::vector<GridPoint> tally_grid(std::span<const PricePoint> series, const ThresholdGrid& grid,
                                         ReturnConvention convention = ReturnConvention::Fractional,
                                         unsigned threads = 0) {
  std::vector<GridPoint> out(grid.size());
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
  std::vector<std::exception_ptr> failures(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        out[i] = {grid[i], tally_events(series, DissectionConfig{grid[i], convention})};
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

inline LawFit fit_law(Law law, std::vector<GridPoint> grid, std::size_t min_count) {
  LawFit result{law, {}, {}, std::move(grid)};
  for (const auto& g : result.grid) {
    if (g.tally.dc_count == 0 || g.tally.dc_count < min_count) continue;
    if (law == Law::DcCount) {
      result.samples.push_back({g.threshold, static_cast<double>(g.tally.dc_count)});
    } else if (g.tally.closed_overshoots > 0 && g.tally.overshoot_sum > 0.0) {
      result.samples.push_back({g.threshold, g.tally.mean_overshoot()});
    }
  }
  if (result.samples.size() < 2) {
    throw InsufficientEventsError(std::string("insufficient events: ") + to_string(law) + " law has " +
                                  std::to_string(result.samples.size()) + " usable grid points");
  }
  result.fit = fit_power_law(result.samples);
  return result;
}

/// N(h) = (h / C)^E over the grid.
inline LawFit dc_count_law(std::span<const PricePoint> series, const ThresholdGrid& grid,
                           const LawOptions& options = {}) {
  return fit_law(Law::DcCount, tally_grid(series, grid, options.convention, options.threads),
                 options.min_count);
}

/// <|overshoot|>(h) = (h / C)^E over the grid.
inline LawFit overshoot_law(std::span<const PricePoint> series, const ThresholdGrid& grid,
                            const LawOptions& options = {}) {
  return fit_law(Law::Overshoot, tally_grid(series, grid, options.convention, options.threads),
                 options.min_count);
}

enum class TailMethod { Hill, CcdfRegression };

struct TailEstimate {
  double alpha = 0.0;   // density exponent: f(x) ~ x^-alpha
  double standard_error = 0.0;
  std::size_t n_tail = 0;
};

/// Estimates alpha from the samples at or above `x_min`.
inline TailEstimate tail_exponent(std::span<const double> samples, double x_min,
                                  TailMethod method = TailMethod::Hill) {
  if (!(x_min > 0.0)) throw DomainError("x_min must be positive");
  std::vector<double> tail;
  for (double x : samples) {
    if (x >= x_min) tail.push_back(x);
  }
  if (tail.size() < 10) {
    throw InsufficientEventsError("insufficient tail: " + std::to_string(tail.size()) +
                                  " samples at or above x_min");
  }
  std::sort(tail.begin(), tail.end());
  const double n = static_cast<double>(tail.size());

  if (method == TailMethod::Hill) {
    double log_sum = 0.0;
    for (double x : tail) log_sum += std::log(x / x_min);
    if (!(log_sum > 0.0)) throw DomainError("tail samples all equal x_min");
    const double alpha = 1.0 + n / log_sum;
    return {alpha, (alpha - 1.0) / std::sqrt(n), tail.size()};
  }

  // Empirical P(X >= x_(i)) = (n - i) / n with x sorted ascending.
  std::vector<double> lx(tail.size()), ly(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    lx[i] = std::log(tail[i]);
    ly[i] = std::log((n - static_cast<double>(i)) / n);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("tail samples have no spread");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double r = ly[i] - intercept - slope * lx[i];
    ss_res += r * r;
  }
  return {1.0 - slope, std::sqrt(ss_res / (n - 2.0) / sxx), tail.size()};
}

}  // namespace dcscale
