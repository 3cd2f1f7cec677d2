#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace traitlab {

// Shortest representation that round-trips the exact double. Used for all
// CSV output so equal values always serialize to equal bytes.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// "p < .001" / "p = .017" style, matching the reporting convention used in
// the analysis summaries (three decimals, leading zero stripped, trailing
// zeros trimmed).
inline std::string format_p_value(double p) {
  if (p < 0.001) return "p < .001";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", p);
  std::string s(buf);
  if (!s.empty() && s.front() == '0') s.erase(s.begin());
  while (s.size() > 2 && s.back() == '0') s.pop_back();
  return "p = " + s;
}

// "F = 4.57, p < .001"
inline std::string format_f_report(double f, double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "F = %.2f, ", f);
  return std::string(buf) + format_p_value(p);
}

// "16.17 ± 0.45" style mean-squared-error summary
inline std::string format_mse_report(double mean, double spread) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, spread);
  return std::string(buf);
}

} // namespace traitlab
