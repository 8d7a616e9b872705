#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optrend::csv {

// Shortest round-trippable form; "NA" marks undefined values in every exported table.
inline std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

inline std::string num(std::optional<double> v) { return v ? num(*v) : std::string("NA"); }

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    std::size_t lead = f.find_first_not_of(' ');
    f = lead == std::string::npos ? std::string() : f.substr(lead);
  }
  return out;
}

inline std::optional<double> parse_optional(std::string_view field) {
  if (field.empty() || field == "NA" || field == "nan" || field == "NaN") return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::invalid_argument("bad number: " + std::string(field));
  return v;
}

inline double parse_double(std::string_view field) {
  auto v = parse_optional(field);
  if (!v) throw std::invalid_argument("missing number");
  return *v;
}

// Tags and ids in this project never contain commas or quotes; fields are written raw.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::size_t width_;
  std::ostringstream out_;
};

}  // namespace optrend::csv
