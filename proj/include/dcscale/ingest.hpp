#pragma once

// Tick-file ingestion: CSV parsing with header auto-detection, timestamp
// normalization to epoch milliseconds, validation, price-side reduction and
// a bit-stable CSV writer.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcscale/core.hpp"

namespace dcscale {

enum class PriceSide : std::uint8_t { Bid, Ask, Mid };

/// Column layout of a tick file. Auto means "infer from header or field count".
enum class ColumnLayout : std::uint8_t { Auto, TimeBidAsk, TimePrice };

enum class HeaderMode : std::uint8_t { Auto, Present, Absent };

struct TickFormat {
  char delimiter = ',';
  ColumnLayout layout = ColumnLayout::Auto;
  HeaderMode header = HeaderMode::Auto;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) noexcept {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

// Exactly `n` digits.
inline bool fixed_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) noexcept {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return parse_int(s.substr(pos, n), out);
}

inline std::optional<TimestampMs> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  // YYYY-MM-DD[T ]HH:MM:SS[.fff...][Z|(+|-)HH[:]MM]
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!fixed_digits(s, 0, 4, y) || s.size() < 19 || s[4] != '-' ||
      !fixed_digits(s, 5, 2, mo) || s[7] != '-' || !fixed_digits(s, 8, 2, d) ||
      (s[10] != 'T' && s[10] != ' ') || !fixed_digits(s, 11, 2, h) || s[13] != ':' ||
      !fixed_digits(s, 14, 2, mi) || s[16] != ':' || !fixed_digits(s, 17, 2, sec)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;

  std::size_t pos = 19;
  std::int64_t millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    std::int64_t scale = 100;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      millis += (s[pos] - '0') * scale;  // digits past the third are dropped
      scale /= 10;
      ++pos;
    }
    if (pos == digits_start) return std::nullopt;
  }

  std::int64_t offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      int oh = 0, om = 0;
      if (!fixed_digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!fixed_digits(s, mpos, 2, om)) return std::nullopt;
      offset_minutes = sign * (oh * 60 + om);
      pos = mpos + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  const auto days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t seconds =
      static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec - offset_minutes * 60;
  return seconds * 1000 + millis;
}

inline std::optional<double> parse_price(std::string_view s) noexcept {
  double v = 0.0;
  if (s.empty()) return std::nullopt;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

/// Accepts integer epoch milliseconds or ISO-8601 (UTC unless an offset is given).
inline std::optional<TimestampMs> parse_timestamp(std::string_view text) {
  text = detail::trim(text);
  TimestampMs ms = 0;
  if (detail::parse_int(text, ms)) return ms;
  return detail::parse_iso8601(text);
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// Parses a tick CSV. Rows come back in file order; time,price rows become
/// ticks with bid == ask == price. Empty input yields an empty vector.
inline std::vector<Tick> parse_ticks(std::istream& in, const TickFormat& format = {}) {
  std::vector<Tick> ticks;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  ColumnLayout layout = format.layout;
  std::size_t time_col = 0, bid_col = 1, ask_col = 2, price_col = 1;
  std::size_t min_fields = 0;

  auto resolve_positional = [&](std::size_t n_fields, std::size_t at_line) {
    if (layout == ColumnLayout::Auto) {
      if (n_fields == 3) layout = ColumnLayout::TimeBidAsk;
      else if (n_fields == 2) layout = ColumnLayout::TimePrice;
      else throw DataError("cannot infer column layout from " + std::to_string(n_fields) + " fields", at_line);
    }
    min_fields = layout == ColumnLayout::TimeBidAsk ? 3 : 2;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    const auto fields = detail::split(view, format.delimiter);

    if (first_content) {
      first_content = false;
      const bool has_header =
          format.header == HeaderMode::Present ||
          (format.header == HeaderMode::Auto && !parse_timestamp(fields[0]).has_value());
      if (has_header) {
        std::optional<std::size_t> t, b, a, p;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          const auto name = detail::lower(fields[i]);
          if (name == "time" || name == "timestamp") t = i;
          else if (name == "bid") b = i;
          else if (name == "ask") a = i;
          else if (name == "price" || name == "mid") p = i;
        }
        if (!t) throw DataError("header lacks a time column", line_no);
        time_col = *t;
        if (b && a && layout != ColumnLayout::TimePrice) {
          layout = ColumnLayout::TimeBidAsk;
          bid_col = *b;
          ask_col = *a;
          min_fields = std::max({time_col, bid_col, ask_col}) + 1;
        } else if (p && layout != ColumnLayout::TimeBidAsk) {
          layout = ColumnLayout::TimePrice;
          price_col = *p;
          min_fields = std::max(time_col, price_col) + 1;
        } else {
          throw DataError("header must name time,bid,ask or time,price columns", line_no);
        }
        continue;
      }
      resolve_positional(fields.size(), line_no);
    }

    if (fields.size() < min_fields) {
      throw DataError("expected " + std::to_string(min_fields) + " fields, got " +
                          std::to_string(fields.size()),
                      line_no);
    }
    const auto time = parse_timestamp(fields[time_col]);
    if (!time) throw DataError("malformed timestamp '" + std::string(fields[time_col]) + "'", line_no);

    Tick tick{*time, 0.0, 0.0};
    if (layout == ColumnLayout::TimeBidAsk) {
      const auto bid = detail::parse_price(fields[bid_col]);
      const auto ask = detail::parse_price(fields[ask_col]);
      if (!bid || !ask) throw DataError("malformed price", line_no);
      tick.bid = *bid;
      tick.ask = *ask;
    } else {
      const auto price = detail::parse_price(fields[price_col]);
      if (!price) throw DataError("malformed price", line_no);
      tick.bid = tick.ask = *price;
    }
    if (!(tick.bid > 0.0) || !(tick.ask > 0.0) || !std::isfinite(tick.ask)) {
      throw DataError("prices must be positive and finite", line_no);
    }
    if (tick.ask < tick.bid) throw DataError("ask below bid", line_no);
    if (!ticks.empty() && tick.time < ticks.back().time) {
      throw TimeRegressionError(ticks.back().time, tick.time, line_no);
    }
    ticks.push_back(tick);
  }
  return ticks;
}

inline std::vector<Tick> parse_ticks_file(const std::string& path, const TickFormat& format = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_ticks(in, format);
}

/// Writes `time,bid,ask` with epoch-ms times and shortest round-trip prices.
inline void write_ticks(std::ostream& out, std::span<const Tick> ticks) {
  out << "time,bid,ask\n";
  for (const auto& t : ticks) {
    out << t.time << ',' << format_double(t.bid) << ',' << format_double(t.ask) << '\n';
  }
}

inline void write_prices(std::ostream& out, std::span<const PricePoint> points) {
  out << "time,price\n";
  for (const auto& p : points) out << p.time << ',' << format_double(p.price) << '\n';
}

inline PricePoint mid_price(const Tick& t) noexcept { return {t.time, (t.bid + t.ask) / 2.0}; }

inline PricePoint select_price(const Tick& t, PriceSide side) noexcept {
  switch (side) {
    case PriceSide::Bid: return {t.time, t.bid};
    case PriceSide::Ask: return {t.time, t.ask};
    default: return mid_price(t);
  }
}

inline std::vector<PricePoint> to_price_series(std::span<const Tick> ticks,
                                               PriceSide side = PriceSide::Mid) {
  std::vector<PricePoint> out;
  out.reserve(ticks.size());
  for (const auto& t : ticks) out.push_back(select_price(t, side));
  return out;
}

/// Drops ticks whose relative spread (ask - bid) / mid exceeds `max_relative_spread`.
inline std::vector<Tick> filter_max_spread(std::span<const Tick> ticks, double max_relative_spread) {
  if (!(max_relative_spread >= 0.0)) throw DomainError("max spread must be non-negative");
  std::vector<Tick> out;
  out.reserve(ticks.size());
  for (const auto& t : ticks) {
    const double mid = (t.bid + t.ask) / 2.0;
    if ((t.ask - t.bid) / mid <= max_relative_spread) out.push_back(t);
  }
  return out;
}

struct SeriesStats {
  std::size_t count = 0;
  TimestampMs first_time = 0;
  TimestampMs last_time = 0;
  TimestampMs max_gap = 0;
  std::size_t gaps_over_threshold = 0;
  double min_mid = 0.0;
  double max_mid = 0.0;
  double mean_relative_spread = 0.0;
  double max_relative_spread = 0.0;
};

inline SeriesStats summarize(std::span<const Tick> ticks, TimestampMs gap_threshold_ms) {
  SeriesStats s;
  s.count = ticks.size();
  if (ticks.empty()) return s;
  s.first_time = ticks.front().time;
  s.last_time = ticks.back().time;
  s.min_mid = s.max_mid = mid_price(ticks.front()).price;
  double spread_sum = 0.0;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const double mid = mid_price(ticks[i]).price;
    const double spread = (ticks[i].ask - ticks[i].bid) / mid;
    spread_sum += spread;
    s.max_relative_spread = std::max(s.max_relative_spread, spread);
    s.min_mid = std::min(s.min_mid, mid);
    s.max_mid = std::max(s.max_mid, mid);
    if (i > 0) {
      const auto gap = ticks[i].time - ticks[i - 1].time;
      s.max_gap = std::max(s.max_gap, gap);
      if (gap > gap_threshold_ms) ++s.gaps_over_threshold;
    }
  }
  s.mean_relative_spread = spread_sum / static_cast<double>(ticks.size());
  return s;
}

}  // namespace dcscale
