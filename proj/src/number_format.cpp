#include "metaaudit/number_format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "metaaudit/error.hpp"

namespace metaaudit {

std::string format_sig6(double value) {
  if (!std::isfinite(value)) throw DomainError("cannot format a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

double round_sig6(double value) {
  const std::string text = format_sig6(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) throw DomainError("cannot format a non-finite number");
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  std::string out(buf, res.ptr);
  if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);  // no "-0.00"
  }
  return out;
}

}  // namespace metaaudit
