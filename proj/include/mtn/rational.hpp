#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mtn {

// Exact rational scalar used throughout the library.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p", "-p", or "p/q" (q > 0 after canonicalization). Rejects
// everything else, including q == 0.
std::optional<Rat> parse_rational(std::string_view text);

// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& q);

// Decimal rendering with the given number of fractional digits, truncated
// toward zero. Display only; never round-trips.
std::string rat_decimal(const Rat& q, int digits = 9);

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Rat rat_pow_int(const Rat& base, unsigned long e) {
  Rat out(1);
  Rat b = base;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

inline Int int_pow(const Int& base, unsigned long e) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace mtn
