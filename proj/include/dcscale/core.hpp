#pragma once

// Domain types shared by every dcscale module: ticks, prices, event-clock
// configuration, events, segments, fits and agent positions.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcscale {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

// ---------------------------------------------------------------------------
// Errors. Every library failure derives from Error so callers can catch once.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter (non-positive price, bad threshold, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad input data. Carries the 1-based source line when known (0 otherwise).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Out-of-order timestamps fed to the event clock or found in a file.
class TimeRegressionError : public DataError {
 public:
  TimeRegressionError(TimestampMs previous, TimestampMs offending,
                      std::size_t line = 0)
      : DataError("time regression: " + std::to_string(offending) + " < " +
                      std::to_string(previous),
                  line),
        previous_(previous),
        offending_(offending) {}

  TimestampMs previous() const noexcept { return previous_; }
  TimestampMs offending() const noexcept { return offending_; }

 private:
  TimestampMs previous_;
  TimestampMs offending_;
};

/// Not enough events/samples to estimate anything.
class InsufficientEventsError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Market data
// ---------------------------------------------------------------------------

struct Tick {
  TimestampMs time = 0;
  double bid = 0.0;
  double ask = 0.0;

  friend bool operator==(const Tick&, const Tick&) = default;
};

inline bool is_valid(const Tick& t) noexcept {
  return t.bid > 0.0 && t.ask > 0.0 && t.ask >= t.bid && std::isfinite(t.ask);
}

struct PricePoint {
  TimestampMs time = 0;
  double price = 0.0;

  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

// ---------------------------------------------------------------------------
// Event clock
// ---------------------------------------------------------------------------

enum class Mode : std::uint8_t { Unset, Up, Down };

inline Mode opposite(Mode m) noexcept {
  switch (m) {
    case Mode::Up: return Mode::Down;
    case Mode::Down: return Mode::Up;
    default: return Mode::Unset;
  }
}

enum class ReturnConvention : std::uint8_t { Fractional, Logarithmic };

/// Signed move from `from` to `to`: (to - from) / from, or ln(to / from).
inline double relative_move(double from, double to,
                            ReturnConvention convention = ReturnConvention::Fractional) {
  if (!(from > 0.0) || !(to > 0.0)) {
    throw DomainError("relative_move: prices must be positive");
  }
  return convention == ReturnConvention::Fractional ? (to - from) / from
                                                    : std::log(to / from);
}

/// Threshold and return convention of one event clock. Always valid once built.
class DissectionConfig {
 public:
  explicit DissectionConfig(double threshold,
                            ReturnConvention convention = ReturnConvention::Fractional)
      : threshold_(threshold), convention_(convention) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw DomainError("threshold must lie in (0, 1), got " + std::to_string(threshold));
    }
  }

  double threshold() const noexcept { return threshold_; }
  ReturnConvention convention() const noexcept { return convention_; }

  double move(double from, double to) const { return relative_move(from, to, convention_); }

  friend bool operator==(const DissectionConfig&, const DissectionConfig&) = default;

 private:
  double threshold_;
  ReturnConvention convention_;
};

enum class EventKind : std::uint8_t { DirectionalChange, Overshoot };

struct Event {
  EventKind kind = EventKind::DirectionalChange;
  Mode mode = Mode::Unset;  // direction after the event
  TimestampMs time = 0;
  double price = 0.0;  // observed trigger price
  std::uint64_t tick_index = 0;
  std::uint64_t intrinsic_index = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class SegmentKind : std::uint8_t { DirectionalChange, Overshoot };

struct Segment {
  SegmentKind kind = SegmentKind::DirectionalChange;
  double start_price = 0.0;
  double end_price = 0.0;
  TimestampMs start_time = 0;
  TimestampMs end_time = 0;
  double magnitude = 0.0;  // |move| under the producing config's convention

  friend bool operator==(const Segment&, const Segment&) = default;
};

// ---------------------------------------------------------------------------
// Fits and agents
// ---------------------------------------------------------------------------

/// y = (x / C)^E, estimated by least squares in log-log space.
struct ScalingFit {
  double C = 0.0;
  double E = 0.0;
  double intercept = 0.0;  // ln y = intercept + E ln x
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// Position {entry price, gearing}. gearing == 0 means flat.
struct Agent {
  double entry_price = 0.0;
  double gearing = 0.0;
  double realized_pnl = 0.0;

  bool flat() const noexcept { return gearing == 0.0; }
  double unrealized_pnl(double mark) const noexcept {
    return flat() ? 0.0 : gearing * (mark - entry_price);
  }
};

inline const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::Up: return "up";
    case Mode::Down: return "down";
    default: return "unset";
  }
}

inline const char* to_string(EventKind k) noexcept {
  return k == EventKind::DirectionalChange ? "dc" : "os";
}

inline const char* to_string(SegmentKind k) noexcept {
  return k == SegmentKind::DirectionalChange ? "dc" : "os";
}

}  // namespace dcscale
