#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcscale/dcscale.hpp"

namespace dcscale::cli {
namespace {

using nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct InputOptions {
  std::string path;
  std::string price_side = "mid";
  std::string delimiter = ",";
  double max_spread = 0.0;  // 0: no filter
  std::string convention = "fractional";
};

void add_input_options(CLI::App& cmd, InputOptions& o) {
  cmd.add_option("--input,-i", o.path, "Tick CSV (time,bid,ask or time,price)")->required();
  cmd.add_option("--price-side", o.price_side, "Price used for dissection")
      ->check(CLI::IsMember({"bid", "ask", "mid"}));
  cmd.add_option("--delimiter", o.delimiter, "CSV field delimiter");
  cmd.add_option("--max-spread", o.max_spread,
                 "Drop ticks whose (ask-bid)/mid exceeds this bound (0 disables)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--convention", o.convention, "Return convention for thresholds")
      ->check(CLI::IsMember({"fractional", "log"}));
}

ReturnConvention convention_of(const InputOptions& o) {
  return o.convention == "log" ? ReturnConvention::Logarithmic : ReturnConvention::Fractional;
}

TickFormat format_of(const InputOptions& o) {
  if (o.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
  TickFormat f;
  f.delimiter = o.delimiter[0];
  return f;
}

std::vector<Tick> load_ticks(const InputOptions& o) {
  const auto format = format_of(o);
  auto ticks = parse_ticks_file(o.path, format);
  if (o.max_spread > 0.0) ticks = filter_max_spread(ticks, o.max_spread);
  return ticks;
}

std::vector<PricePoint> load_series(const InputOptions& o) {
  const auto side = o.price_side == "bid"   ? PriceSide::Bid
                    : o.price_side == "ask" ? PriceSide::Ask
                                            : PriceSide::Mid;
  return to_price_series(load_ticks(o), side);
}

// Writes through a temporary so a failed run leaves no partial file.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << content;
    if (!f) throw DataError("write failed: " + path);
  }
  std::filesystem::rename(tmp, path);
}

std::string resolve_format(const std::string& explicit_format, const std::string& path,
                           const std::string& fallback) {
  if (!explicit_format.empty()) return explicit_format;
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return "csv";
  if (ext == ".jsonl" || ext == ".json") return "jsonl";
  return fallback;
}

std::string events_to_text(const std::vector<Event>& events, const std::string& format) {
  std::ostringstream s;
  if (format == "csv") {
    s << "intrinsic_index,kind,mode,time,price,tick_index\n";
    for (const auto& e : events) {
      s << e.intrinsic_index << ',' << to_string(e.kind) << ',' << to_string(e.mode) << ','
        << e.time << ',' << format_double(e.price) << ',' << e.tick_index << '\n';
    }
  } else {
    for (const auto& e : events) {
      s << "{\"intrinsic_index\":" << e.intrinsic_index << ",\"kind\":\"" << to_string(e.kind)
        << "\",\"mode\":\"" << to_string(e.mode) << "\",\"time\":" << e.time
        << ",\"price\":" << format_double(e.price) << ",\"tick_index\":" << e.tick_index << "}\n";
    }
  }
  return s.str();
}

ThresholdGrid parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw UsageError("--grid must be min:max:count, got '" + text + "'");
  }
  try {
    const double lo = std::stod(text.substr(0, first));
    const double hi = std::stod(text.substr(first + 1, second - first - 1));
    const auto count = std::stoul(text.substr(second + 1));
    return ThresholdGrid::log_spaced(lo, hi, count);
  } catch (const std::logic_error&) {
    throw UsageError("--grid must be min:max:count, got '" + text + "'");
  }
}

ordered_json fit_to_json(const LawFit& f, ReturnConvention convention) {
  ordered_json j;
  j["law"] = to_string(f.law);
  j["C"] = f.fit.C;
  j["E"] = f.fit.E;
  j["intercept"] = f.fit.intercept;
  j["r_squared"] = f.fit.r_squared;
  j["n_points"] = f.fit.n_points;
  j["convention"] = convention == ReturnConvention::Logarithmic ? "log" : "fractional";
  j["samples"] = ordered_json::array();
  for (const auto& s : f.samples) j["samples"].push_back({{"x", s.x}, {"y", s.y}});
  return j;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directional-change event dissection and scaling-law estimation", "dcscale"};
  app.require_subcommand(1);

  // dissect
  InputOptions dissect_in;
  double dissect_threshold = 0.0;
  std::string dissect_out, dissect_format;
  auto* dissect_cmd = app.add_subcommand("dissect", "Emit directional-change and overshoot events");
  add_input_options(*dissect_cmd, dissect_in);
  dissect_cmd->add_option("--threshold,-t", dissect_threshold, "Threshold as a fraction")->required();
  dissect_cmd->add_option("--out,-o", dissect_out, "Output file (.jsonl or .csv); stdout if omitted");
  dissect_cmd->add_option("--format", dissect_format)->check(CLI::IsMember({"csv", "jsonl"}));

  // coastline
  InputOptions coast_in;
  double coast_threshold = 0.0;
  std::string coast_out;
  auto* coast_cmd = app.add_subcommand("coastline", "Event-indexed price polyline and its length");
  add_input_options(*coast_cmd, coast_in);
  coast_cmd->add_option("--threshold,-t", coast_threshold)->required();
  coast_cmd->add_option("--out,-o", coast_out, "Coastline CSV; stdout if omitted");

  // fit
  InputOptions fit_in;
  std::string fit_law_name = "dc-count", fit_grid = "0.0005:0.05:12", fit_out, fit_samples_csv;
  std::size_t fit_min_count = 10;
  unsigned fit_threads = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a scaling law over a threshold grid");
  add_input_options(*fit_cmd, fit_in);
  fit_cmd->add_option("--law", fit_law_name)->check(CLI::IsMember({"dc-count", "overshoot"}));
  fit_cmd->add_option("--grid", fit_grid, "Log-spaced grid min:max:count");
  fit_cmd->add_option("--min-count", fit_min_count, "Minimum DCs for a grid point to enter the fit");
  fit_cmd->add_option("--threads", fit_threads, "Worker threads (0: all cores)");
  fit_cmd->add_option("--out,-o", fit_out, "Fit JSON; stdout if omitted");
  fit_cmd->add_option("--samples-csv", fit_samples_csv, "Also write fitted samples as x,y CSV");

  // generate
  GeneratorSpec gen;
  std::string gen_kind = "gbm", gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic series");
  gen_cmd->add_option("--kind", gen_kind)
      ->check(CLI::IsMember({"gbm", "random-walk", "sawtooth", "pareto"}));
  gen_cmd->add_option("--n", gen.n)->required();
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--start", gen.start, "Initial price");
  gen_cmd->add_option("--sigma", gen.sigma, "GBM per-step volatility");
  gen_cmd->add_option("--mu", gen.mu, "GBM per-step drift");
  gen_cmd->add_option("--step", gen.step, "Random-walk step size");
  gen_cmd->add_option("--amplitude", gen.amplitude, "Sawtooth fractional swing");
  gen_cmd->add_option("--alpha", gen.alpha, "Pareto density exponent");
  gen_cmd->add_option("--x-min", gen.x_min, "Pareto lower bound");
  gen_cmd->add_option("--out,-o", gen_out, "Output CSV; stdout if omitted");

  // agent-sim
  InputOptions agent_in;
  double agent_threshold = 0.0;
  std::string agent_policy = "contrarian", agent_out;
  AgentRules rules;
  auto* agent_cmd = app.add_subcommand("agent-sim", "Run the demonstration agent over the events");
  add_input_options(*agent_cmd, agent_in);
  agent_cmd->add_option("--threshold,-t", agent_threshold)->required();
  agent_cmd->add_option("--policy", agent_policy)->check(CLI::IsMember({"contrarian", "trend"}));
  agent_cmd->add_option("--unit", rules.unit_gearing, "Gearing per adjustment");
  agent_cmd->add_option("--max-gearing", rules.max_gearing, "Absolute gearing cap");
  agent_cmd->add_option("--out,-o", agent_out, "Trajectory CSV; stdout if omitted");

  // stats
  InputOptions stats_in;
  TimestampMs gap_ms = 3'600'000;
  auto* stats_cmd = app.add_subcommand("stats", "Tick count, time span, gaps and spreads");
  add_input_options(*stats_cmd, stats_in);
  stats_cmd->add_option("--gap-ms", gap_ms, "Gaps longer than this are counted");

  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend() - 1);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*dissect_cmd) {
      const DissectionConfig config{dissect_threshold, convention_of(dissect_in)};
      const auto format = resolve_format(dissect_format, dissect_out, "jsonl");
      const auto series = load_series(dissect_in);
      const auto d = dissect(series, config);
      emit(dissect_out, events_to_text(d.events, format), out);
    } else if (*coast_cmd) {
      const DissectionConfig config{coast_threshold, convention_of(coast_in)};
      const auto series = load_series(coast_in);
      const auto c = coastline(dissect(series, config));
      std::ostringstream s;
      s << "intrinsic_index,price\n";
      for (const auto& p : c.points) s << p.intrinsic_index << ',' << format_double(p.price) << '\n';
      emit(coast_out, s.str(), out);
      (coast_out.empty() ? err : out) << "total_length=" << format_double(c.total_length)
                                      << " events=" << c.points.size() << '\n';
    } else if (*fit_cmd) {
      const auto grid = parse_grid(fit_grid);
      const Law law = fit_law_name == "overshoot" ? Law::Overshoot : Law::DcCount;
      const LawOptions options{fit_min_count, convention_of(fit_in), fit_threads};
      const auto series = load_series(fit_in);
      const auto f = law == Law::DcCount ? dc_count_law(series, grid, options)
                                         : overshoot_law(series, grid, options);
      emit(fit_out, fit_to_json(f, options.convention).dump(2) + "\n", out);
      if (!fit_samples_csv.empty()) {
        std::ostringstream s;
        s << "x,y\n";
        for (const auto& p : f.samples) s << format_double(p.x) << ',' << format_double(p.y) << '\n';
        emit(fit_samples_csv, s.str(), out);
      }
    } else if (*gen_cmd) {
      gen.kind = gen_kind == "random-walk" ? GeneratorKind::ArithmeticRandomWalk
                 : gen_kind == "sawtooth"  ? GeneratorKind::Sawtooth
                 : gen_kind == "pareto"    ? GeneratorKind::ParetoSamples
                                           : GeneratorKind::GeometricBrownianMotion;
      std::ostringstream s;
      if (gen.kind == GeneratorKind::ParetoSamples) {
        s << "value\n";
        for (double v : generate_pareto(gen)) s << format_double(v) << '\n';
      } else {
        write_prices(s, generate_series(gen));
      }
      emit(gen_out, s.str(), out);
    } else if (*agent_cmd) {
      const DissectionConfig config{agent_threshold, convention_of(agent_in)};
      rules.policy = agent_policy == "trend" ? DirectionPolicy::TrendFollowing
                                             : DirectionPolicy::Contrarian;
      rules.validate();
      const auto series = load_series(agent_in);
      const auto t = run_strategy(series, config, rules);
      std::ostringstream s;
      s << "intrinsic_index,gearing,entry_price,unrealized,realized\n";
      for (const auto& r : t.records) {
        s << r.intrinsic_index << ',' << format_double(r.gearing) << ','
          << format_double(r.entry_price) << ',' << format_double(r.unrealized_pnl) << ','
          << format_double(r.realized_pnl) << '\n';
      }
      emit(agent_out, s.str(), out);
      (agent_out.empty() ? err : out) << "realized=" << format_double(t.final_realized)
                                      << " unrealized=" << format_double(t.final_unrealized)
                                      << " total=" << format_double(t.total_pnl()) << '\n';
    } else if (*stats_cmd) {
      const auto s = summarize(load_ticks(stats_in), gap_ms);
      ordered_json j;
      j["count"] = s.count;
      j["first_time"] = s.first_time;
      j["last_time"] = s.last_time;
      j["span_ms"] = s.last_time - s.first_time;
      j["max_gap_ms"] = s.max_gap;
      j["gap_threshold_ms"] = gap_ms;
      j["gaps_over_threshold"] = s.gaps_over_threshold;
      j["min_mid"] = s.min_mid;
      j["max_mid"] = s.max_mid;
      j["mean_relative_spread"] = s.mean_relative_spread;
      j["max_relative_spread"] = s.max_relative_spread;
      out << j.dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const InsufficientEventsError& e) {
    err << "insufficient events: " << e.what() << '\n';
    return kInsufficientEvents;
  } catch (const FitError& e) {
    err << "insufficient events: " << e.what() << '\n';
    return kInsufficientEvents;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return kSuccess;
}

}  // namespace dcscale::cli
