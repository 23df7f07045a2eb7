#pragma once

#include <optional>
#include <string>

namespace censorbias {

/// Rounds to `digits` significant digits (R's `signif`).
double signif(double value, int digits);

/// Shortest decimal text that parses back to exactly `value`; "NaN"/"Inf" for non-finite.
std::string format_shortest(double value);

/// Shortest text of signif(value, digits), e.g. 0.0657 -> "0.066", 0.996 -> "1".
std::string format_signif(double value, int digits);

/// Like R's round(value, digits) printed without trailing zeros: 50.0 -> "50", 12.34 -> "12.3".
std::string format_rounded(double value, int digits);

/// Fixed-point with `decimals` places ("%.*f").
std::string format_fixed(double value, int decimals);

/// Empty string for absent values, otherwise format_shortest.
std::string format_optional(const std::optional<double>& value);

}  // namespace censorbias
