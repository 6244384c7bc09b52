#pragma once

// The directional-change event clock.
//
// A Runner consumes prices one at a time. In Up mode it tracks the running
// high; a fall of at least the threshold from that high is a directional
// change (DC) to Down, after which the running low is tracked and the dual
// rule applies. While the mode is fixed, each further advance of at least the
// threshold from the last event price is an overshoot (OS) event. Before the
// first DC the mode is Unset and the first DC fires once the price has moved
// by the threshold from the initial price.
//
// Segments follow the extremum-to-extremum decomposition: a DC segment runs
// from the previous extremum to the DC trigger, an OS segment from the DC
// trigger to the extremum at which the next DC reverses.

#include <optional>
#include <span>
#include <vector>

#include "dcscale/core.hpp"

namespace dcscale {

/// What a DC just closed: the extremum it reversed from and the previous DC.
struct DcClosure {
  double extremum = 0.0;
  TimestampMs extremum_time = 0;
  double previous_dc_price = 0.0;
  TimestampMs previous_dc_time = 0;
  bool has_previous_dc = false;
};

class Runner {
 public:
  explicit Runner(DissectionConfig config) noexcept : config_(config) {}

  /// Advances the clock by one price; calls `emit(const Event&)` for each event.
  template <class Sink>
  void step(const PricePoint& point, Sink&& emit) {
    if (!(point.price > 0.0) || !std::isfinite(point.price)) {
      throw DomainError("price must be positive and finite");
    }
    if (points_seen_ > 0 && point.time < last_time_) {
      throw TimeRegressionError(last_time_, point.time);
    }
    const std::uint64_t index = points_seen_++;
    last_time_ = point.time;
    const double price = point.price;
    const double threshold = config_.threshold();

    switch (mode_) {
      case Mode::Unset: {
        if (index == 0) {
          extremum_ = price;
          extremum_time_ = point.time;
          return;
        }
        const double m = config_.move(extremum_, price);
        if (m >= threshold) {
          fire_dc(Mode::Up, point, index, emit);
        } else if (m <= -threshold) {
          fire_dc(Mode::Down, point, index, emit);
        }
        return;
      }
      case Mode::Up: {
        if (price > extremum_) {
          extremum_ = price;
          extremum_time_ = point.time;
        }
        if (config_.move(last_event_price_, price) >= threshold) {
          fire_os(point, index, emit);
        } else if (config_.move(extremum_, price) <= -threshold) {
          fire_dc(Mode::Down, point, index, emit);
        }
        return;
      }
      case Mode::Down: {
        if (price < extremum_) {
          extremum_ = price;
          extremum_time_ = point.time;
        }
        if (config_.move(last_event_price_, price) <= -threshold) {
          fire_os(point, index, emit);
        } else if (config_.move(extremum_, price) >= threshold) {
          fire_dc(Mode::Up, point, index, emit);
        }
        return;
      }
    }
  }

  std::vector<Event> step(const PricePoint& point) {
    std::vector<Event> out;
    step(point, [&out](const Event& e) { out.push_back(e); });
    return out;
  }

  const DissectionConfig& config() const noexcept { return config_; }
  Mode mode() const noexcept { return mode_; }
  /// Running high in Up mode, running low in Down mode, initial price while Unset.
  double extremum() const noexcept { return extremum_; }
  TimestampMs extremum_time() const noexcept { return extremum_time_; }
  double last_dc_price() const noexcept { return last_dc_price_; }
  TimestampMs last_dc_time() const noexcept { return last_dc_time_; }
  double last_event_price() const noexcept { return last_event_price_; }
  std::uint64_t intrinsic_counter() const noexcept { return intrinsic_counter_; }
  std::uint64_t points_seen() const noexcept { return points_seen_; }
  /// Valid inside the sink call for a DC event and until the next DC.
  const DcClosure& last_closure() const noexcept { return closure_; }

 private:
  template <class Sink>
  void fire_dc(Mode new_mode, const PricePoint& point, std::uint64_t index, Sink& emit) {
    closure_ = {extremum_, extremum_time_, last_dc_price_, last_dc_time_, mode_ != Mode::Unset};
    mode_ = new_mode;
    extremum_ = last_dc_price_ = last_event_price_ = point.price;
    extremum_time_ = last_dc_time_ = point.time;
    emit(Event{EventKind::DirectionalChange, new_mode, point.time, point.price, index,
               intrinsic_counter_++});
  }

  template <class Sink>
  void fire_os(const PricePoint& point, std::uint64_t index, Sink& emit) {
    last_event_price_ = point.price;
    emit(Event{EventKind::Overshoot, mode_, point.time, point.price, index, intrinsic_counter_++});
  }

  DissectionConfig config_;
  Mode mode_ = Mode::Unset;
  double extremum_ = 0.0;
  TimestampMs extremum_time_ = 0;
  double last_dc_price_ = 0.0;
  TimestampMs last_dc_time_ = 0;
  double last_event_price_ = 0.0;
  std::uint64_t intrinsic_counter_ = 0;
  std::uint64_t points_seen_ = 0;
  TimestampMs last_time_ = 0;
  DcClosure closure_{};
};

inline Runner new_runner(const DissectionConfig& config) noexcept { return Runner{config}; }

struct Dissection {
  DissectionConfig config;
  std::vector<Event> events;
  std::vector<Segment> segments;  // DC, OS, DC, OS, ..., DC
  std::optional<Segment> open_overshoot;
};

namespace detail {

inline Segment make_segment(SegmentKind kind, double from, TimestampMs from_time, double to,
                            TimestampMs to_time, const DissectionConfig& config) {
  return {kind, from, to, from_time, to_time, std::abs(config.move(from, to))};
}

}  // namespace detail

inline Dissection dissect(std::span<const PricePoint> series, const DissectionConfig& config) {
  Dissection d{config, {}, {}, std::nullopt};
  Runner runner(config);
  for (const auto& p : series) {
    runner.step(p, [&](const Event& e) {
      if (e.kind == EventKind::DirectionalChange) {
        const auto& c = runner.last_closure();
        if (c.has_previous_dc) {
          d.segments.push_back(detail::make_segment(SegmentKind::Overshoot, c.previous_dc_price,
                                                    c.previous_dc_time, c.extremum,
                                                    c.extremum_time, config));
        }
        d.segments.push_back(detail::make_segment(SegmentKind::DirectionalChange, c.extremum,
                                                  c.extremum_time, e.price, e.time, config));
      }
      d.events.push_back(e);
    });
  }
  if (runner.mode() != Mode::Unset) {
    d.open_overshoot = detail::make_segment(SegmentKind::Overshoot, runner.last_dc_price(),
                                            runner.last_dc_time(), runner.extremum(),
                                            runner.extremum_time(), config);
  }
  return d;
}

/// Single-pass tallies used by the scaling laws; no event storage.
struct EventTally {
  std::size_t dc_count = 0;
  std::size_t os_event_count = 0;
  std::size_t closed_overshoots = 0;
  double overshoot_sum = 0.0;  // sum of closed OS segment magnitudes

  double mean_overshoot() const {
    if (closed_overshoots == 0) throw InsufficientEventsError("no closed overshoot segment");
    return overshoot_sum / static_cast<double>(closed_overshoots);
  }
};

inline EventTally tally_events(std::span<const PricePoint> series, const DissectionConfig& config) {
  EventTally t;
  Runner runner(config);
  for (const auto& p : series) {
    runner.step(p, [&](const Event& e) {
      if (e.kind == EventKind::Overshoot) {
        ++t.os_event_count;
        return;
      }
      ++t.dc_count;
      const auto& c = runner.last_closure();
      if (c.has_previous_dc) {
        t.overshoot_sum += std::abs(config.move(c.previous_dc_price, c.extremum));
        ++t.closed_overshoots;
      }
    });
  }
  return t;
}

inline std::size_t count_dc(std::span<const PricePoint> series, const DissectionConfig& config) {
  return tally_events(series, config).dc_count;
}

inline std::size_t count_dc(std::span<const PricePoint> series, double threshold) {
  return count_dc(series, DissectionConfig{threshold});
}

/// Mean |overshoot| over closed OS segments; the open trailing one is excluded.
inline double avg_overshoot(std::span<const PricePoint> series, const DissectionConfig& config) {
  return tally_events(series, config).mean_overshoot();
}

inline double avg_overshoot(std::span<const PricePoint> series, double threshold) {
  return avg_overshoot(series, DissectionConfig{threshold});
}

struct CoastPoint {
  std::uint64_t intrinsic_index = 0;
  double price = 0.0;

  friend bool operator==(const CoastPoint&, const CoastPoint&) = default;
};

struct Coastline {
  std::vector<CoastPoint> points;
  double total_length = 0.0;
};

/// Event prices against intrinsic time; length sums the closed segments.
inline Coastline coastline(const Dissection& d) {
  Coastline c;
  c.points.reserve(d.events.size());
  for (const auto& e : d.events) c.points.push_back({e.intrinsic_index, e.price});
  for (const auto& s : d.segments) c.total_length += s.magnitude;
  return c;
}

}  // namespace dcscale
