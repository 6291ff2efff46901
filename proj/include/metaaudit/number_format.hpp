#pragma once

#include <string>

namespace metaaudit {

/// Shortest text for `value` correctly rounded to 6 significant digits
/// (printf "%.6g" semantics; exact binary ties round half to even).
std::string format_sig6(double value);

/// The double nearest to format_sig6(value). Idempotent.
double round_sig6(double value);

/// Fixed-point text with `decimals` places, locale independent.
std::string format_fixed(double value, int decimals);

}  // namespace metaaudit
