#pragma once

// A minimal event-driven agent: a position {entry price, gearing} that reacts
// to DC/OS events with one of two fixed demonstration policies. Pnl is in
// price units per unit of gearing; no spread or costs.

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "dcscale/core.hpp"
#include "dcscale/dissect.hpp"

namespace dcscale {

enum class DirectionPolicy : std::uint8_t { Contrarian, TrendFollowing };

struct AgentRules {
  double unit_gearing = 1.0;
  double max_gearing = 1.0;
  DirectionPolicy policy = DirectionPolicy::Contrarian;

  void validate() const {
    if (!(unit_gearing > 0.0 && unit_gearing <= max_gearing)) {
      throw DomainError("agent rules need 0 < unit_gearing <= max_gearing");
    }
  }
};

/// A change of gearing by `size` (signed) at `price`.
struct Fill {
  std::uint64_t intrinsic_index = 0;
  double size = 0.0;
  double price = 0.0;
};

/// Applies a fill to a position: adds at a volume-weighted entry price,
/// realizes pnl on any reduced part, reopens a flipped remainder at `price`.
inline Agent apply_fill(Agent a, double size, double price) {
  const double g = a.gearing;
  const double next = g + size;
  if (g == 0.0) {
    a.gearing = size;
    a.entry_price = size == 0.0 ? 0.0 : price;
    return a;
  }
  if ((g > 0.0) == (size > 0.0)) {
    a.entry_price = (a.entry_price * g + price * size) / next;
    a.gearing = next;
    return a;
  }
  const bool flips = std::abs(size) > std::abs(g);
  const double closed = std::abs(size) >= std::abs(g) ? g : -size;
  a.realized_pnl += closed * (price - a.entry_price);
  a.gearing = std::abs(size) == std::abs(g) ? 0.0 : next;
  if (a.gearing == 0.0) a.entry_price = 0.0;
  else if (flips) a.entry_price = price;
  return a;
}

struct AgentStep {
  Agent agent;
  std::optional<Fill> fill;
};

/// OS events adjust gearing by one unit (against the move when contrarian,
/// with it when trend following), capped at +-max_gearing. DC events close.
inline AgentStep on_event(const Agent& agent, const AgentRules& rules, const Event& event) {
  double target = 0.0;
  if (event.kind == EventKind::Overshoot) {
    int direction = event.mode == Mode::Up ? 1 : event.mode == Mode::Down ? -1 : 0;
    if (rules.policy == DirectionPolicy::Contrarian) direction = -direction;
    target = std::clamp(agent.gearing + direction * rules.unit_gearing, -rules.max_gearing,
                        rules.max_gearing);
  }
  const double size = target - agent.gearing;
  if (size == 0.0) return {agent, std::nullopt};
  return {apply_fill(agent, size, event.price), Fill{event.intrinsic_index, size, event.price}};
}

struct TrajectoryRecord {
  std::uint64_t intrinsic_index = 0;
  double gearing = 0.0;
  double entry_price = 0.0;
  double unrealized_pnl = 0.0;  // marked at the event price
  double realized_pnl = 0.0;
};

struct AgentTrajectory {
  std::vector<TrajectoryRecord> records;  // one per event
  std::vector<Fill> fills;
  Agent final_agent;
  double mark_price = 0.0;  // last price of the series
  double final_unrealized = 0.0;
  double final_realized = 0.0;

  double total_pnl() const noexcept { return final_unrealized + final_realized; }
};

inline AgentTrajectory run_strategy(std::span<const PricePoint> series,
                                    const DissectionConfig& config, const AgentRules& rules) {
  rules.validate();
  AgentTrajectory t;
  Agent agent;
  Runner runner(config);
  for (const auto& p : series) {
    runner.step(p, [&](const Event& e) {
      auto step = on_event(agent, rules, e);
      agent = step.agent;
      if (step.fill) t.fills.push_back(*step.fill);
      t.records.push_back({e.intrinsic_index, agent.gearing, agent.entry_price,
                           agent.unrealized_pnl(e.price), agent.realized_pnl});
    });
  }
  t.final_agent = agent;
  if (!series.empty()) {
    t.mark_price = series.back().price;
    t.final_unrealized = agent.unrealized_pnl(t.mark_price);
  }
  t.final_realized = agent.realized_pnl;
  return t;
}

}  // namespace dcscale
