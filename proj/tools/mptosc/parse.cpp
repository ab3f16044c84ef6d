#include <charconv>
#include <string>

#include "commands.hpp"

namespace mptosc {

namespace {

std::optional<double> parse_real(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

// A bare sign in front of i stands for a unit coefficient.
std::optional<double> parse_imaginary(std::string_view text) {
  if (text.empty() || text == "+") return 1.0;
  if (text == "-") return -1.0;
  return parse_real(text);
}

}  // namespace

std::optional<std::complex<double>> parse_complex(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const char last = text.back();
  if (last != 'i' && last != 'j') {
    const auto re = parse_real(text);
    if (!re) return std::nullopt;
    return std::complex<double>(*re, 0.0);
  }

  const std::string_view body = text.substr(0, text.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) {
    const auto im = parse_imaginary(body);
    if (!im) return std::nullopt;
    return std::complex<double>(0.0, *im);
  }
  const auto re = parse_real(body.substr(0, split));
  const auto im = parse_imaginary(body.substr(split));
  if (!re || !im) return std::nullopt;
  return std::complex<double>(*re, *im);
}

}  // namespace mptosc
