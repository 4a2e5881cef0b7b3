#include "mtn/rational.hpp"

#include <cctype>

namespace mtn {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::optional<Rat> parse_rational(std::string_view text) {
  std::string_view num = text;
  std::string_view den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  bool neg = false;
  if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
    neg = num.front() == '-';
    num.remove_prefix(1);
  }
  if (!all_digits(num) || !all_digits(den)) return std::nullopt;
  Int n(std::string(num), 10);
  Int d(std::string(den), 10);
  if (d == 0) return std::nullopt;
  Rat q(n, d);
  q.canonicalize();
  if (neg) q = -q;
  return q;
}

std::string rat_str(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string rat_decimal(const Rat& q, int digits) {
  Int num = q.get_num();
  bool neg = num < 0;
  if (neg) num = -num;
  Int den = q.get_den();
  Int whole = num / den;
  Int rem = num % den;
  std::string out = (neg ? "-" : "") + whole.get_str();
  if (digits <= 0) return out;
  out += ".";
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    out += Int(rem / den).get_str();
    rem %= den;
  }
  return out;
}

}  // namespace mtn
