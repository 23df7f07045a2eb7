#include "censorbias/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace censorbias {

double signif(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  if (digits < 1) digits = 1;
  const int magnitude = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  const int shift = digits - 1 - magnitude;
  // Dividing by a power of ten keeps e.g. 0.066 exact where multiplying by 1e-3 would not.
  if (shift >= 0) {
    const double scale = std::pow(10.0, shift);
    return std::round(value * scale) / scale;
  }
  const double scale = std::pow(10.0, -shift);
  return std::round(value / scale) * scale;
}

std::string format_shortest(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string format_signif(double value, int digits) { return format_shortest(signif(value, digits)); }

std::string format_rounded(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  return format_shortest(std::round(value * scale) / scale);
}

std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_shortest(*value) : std::string{};
}

}  // namespace censorbias
