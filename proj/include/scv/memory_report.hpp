#ifndef SCV_MEMORY_REPORT_HPP
#define SCV_MEMORY_REPORT_HPP

// Size accounting for dense and top-k correlation volumes. Only the 32-bit
// correlation values are counted; sparse coordinates are reported separately.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "scv/error.hpp"

namespace scv {

struct MemoryReport {
  int image_height = 0;
  int image_width = 0;
  int divisor = 1;
  int feature_height = 0; ///< floor(image_height / divisor)
  int feature_width = 0;
  std::optional<int> k;   ///< empty for the dense volume
  std::uint64_t element_count = 0;
  std::uint64_t bytes = 0;                  ///< 4 * element_count
  std::uint64_t bytes_with_coordinates = 0; ///< adds two f32 coordinates per sparse entry

  bool dense() const { return !k.has_value(); }
};

inline MemoryReport memory_report(int image_height, int image_width, int divisor, std::optional<int> k) {
  detail::require(image_height >= 1 && image_width >= 1, "image dims must be positive");
  detail::require(divisor >= 1 && (divisor & (divisor - 1)) == 0, "divisor must be a power of two");
  detail::require(!k || *k >= 1, "k must be positive");
  MemoryReport r;
  r.image_height = image_height;
  r.image_width = image_width;
  r.divisor = divisor;
  r.feature_height = image_height / divisor;
  r.feature_width = image_width / divisor;
  r.k = k;
  const std::uint64_t pixels = static_cast<std::uint64_t>(r.feature_height) * static_cast<std::uint64_t>(r.feature_width);
  r.element_count = k ? pixels * static_cast<std::uint64_t>(*k) : pixels * pixels;
  r.bytes = 4 * r.element_count;
  r.bytes_with_coordinates = k ? 12 * r.element_count : r.bytes;
  return r;
}

/// Two-significant-figure scientific notation, e.g. "7.8e8".
inline std::string format_scientific(std::uint64_t n) {
  if (n == 0)
    return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", static_cast<double>(n));
  // "%.1e" yields e.g. "7.8e+08"; strip the sign and leading zeros.
  std::string s(buf);
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  const bool negative = exp[0] == '-';
  exp.erase(0, 1);
  exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
  return mant + "e" + (negative ? "-" : "") + exp;
}

/// Decimal units (MB = 1e6 B, GB = 1e9 B). `decimals` applies below 100 units;
/// values of 100 units or more print as integers.
inline std::string format_bytes(std::uint64_t bytes, int decimals) {
  const bool giga = bytes >= 1000000000ULL;
  const double value = static_cast<double>(bytes) / (giga ? 1e9 : 1e6);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f %s", value >= 100.0 ? 0 : decimals, value, giga ? "GB" : "MB");
  return buf;
}

/// Single-report text as printed by the CLI.
inline std::string format_report(const MemoryReport &r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "image %dx%d, divisor %d, features %dx%d, %s\n", r.image_height, r.image_width,
                r.divisor, r.feature_height, r.feature_width,
                r.dense() ? "dense" : ("k=" + std::to_string(*r.k)).c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "elements: %llu\nbytes: %llu (%s)\n",
                static_cast<unsigned long long>(r.element_count), static_cast<unsigned long long>(r.bytes),
                format_bytes(r.bytes, 2).c_str());
  out += buf;
  if (!r.dense()) {
    std::snprintf(buf, sizeof buf, "bytes with coordinates: %llu (%s)\n",
                  static_cast<unsigned long long>(r.bytes_with_coordinates),
                  format_bytes(r.bytes_with_coordinates, 2).c_str());
    out += buf;
  }
  out += format_scientific(r.element_count) + " elements, " + format_bytes(r.bytes, 1) + "\n";
  return out;
}

/// The dense / k=8 / k=32 / k=128 rows at divisors 4 and 8.
inline std::vector<MemoryReport> table_rows(int image_height = 436, int image_width = 1024) {
  std::vector<MemoryReport> rows;
  for (int divisor : {4, 8}) {
    rows.push_back(memory_report(image_height, image_width, divisor, std::nullopt));
    for (int k : {8, 32, 128})
      rows.push_back(memory_report(image_height, image_width, divisor, k));
  }
  return rows;
}

inline std::string format_table(int image_height = 436, int image_width = 1024) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "Correlation volume size for a %dx%d image pair (32-bit values)\n", image_height,
                image_width);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-10s %-7s %-9s %12s %7s %12s %10s %8s\n", "resolution", "variant", "features",
                "elements", "size", "bytes", "memory", "rounded");
  out += buf;
  for (const auto &r : table_rows(image_height, image_width)) {
    const std::string res = "1/" + std::to_string(r.divisor);
    const std::string variant = r.dense() ? "dense" : "k=" + std::to_string(*r.k);
    const std::string dims = std::to_string(r.feature_height) + "x" + std::to_string(r.feature_width);
    std::snprintf(buf, sizeof buf, "%-10s %-7s %-9s %12llu %7s %12llu %10s %8s\n", res.c_str(), variant.c_str(),
                  dims.c_str(), static_cast<unsigned long long>(r.element_count),
                  format_scientific(r.element_count).c_str(), static_cast<unsigned long long>(r.bytes),
                  format_bytes(r.bytes, 2).c_str(), format_bytes(r.bytes, 1).c_str());
    out += buf;
  }
  return out;
}

} // namespace scv

#endif // SCV_MEMORY_REPORT_HPP
