#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrend/csv.hpp"
#include "optrend/day.hpp"

namespace optrend {

// Daily values from `start`; nullopt marks a day without data.
struct DailySeries {
  Day start{};
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  Day end() const { return start + static_cast<std::int32_t>(values.size()) - 1; }
  bool empty() const { return values.empty(); }

  std::optional<double> at(Day d) const {
    if (d < start || d - start >= static_cast<std::int32_t>(values.size())) return std::nullopt;
    return values[static_cast<std::size_t>(d - start)];
  }

  std::size_t defined_count() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.has_value();
    return n;
  }

  static DailySeries from(Day start, const std::vector<double>& v) {
    DailySeries s{start, {}};
    for (double x : v) s.values.emplace_back(x);
    return s;
  }

  // Complement 1 - x on defined days.
  DailySeries complement() const {
    DailySeries s{start, values};
    for (auto& v : s.values)
      if (v) *v = 1.0 - *v;
    return s;
  }

  std::string to_csv(const std::string& column = "value") const {
    csv::Writer w({"day", column});
    for (std::size_t i = 0; i < values.size(); ++i)
      w.row({format_day(start + static_cast<std::int32_t>(i)), csv::num(values[i])});
    return w.str();
  }
};

// Reads a "day,value" table (header required; extra columns ignored). Missing days are gaps.
inline DailySeries read_series_csv(const std::string& text, std::size_t column = 1) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<Day, std::optional<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() <= column) throw std::invalid_argument("short series row: " + line);
    rows.emplace_back(parse_day(f[0]), csv::parse_optional(f[column]));
  }
  DailySeries s;
  if (rows.empty()) return s;
  Day lo = rows.front().first, hi = rows.front().first;
  for (const auto& r : rows) {
    lo = std::min(lo, r.first);
    hi = std::max(hi, r.first);
  }
  s.start = lo;
  s.values.assign(static_cast<std::size_t>(hi - lo) + 1, std::nullopt);
  for (const auto& r : rows) s.values[static_cast<std::size_t>(r.first - lo)] = r.second;
  return s;
}

}  // namespace optrend
