#pragma once

#include <string>

#include "mtn/rational.hpp"

namespace mtn {

// Certified enclosure [lo, hi] of a real value. All operations round
// outward; exact rational inputs stay exact until an irrational operation
// (square root, non-integer power) forces dyadic rounding.
struct Enclosure {
  Rat lo;
  Rat hi;

  Enclosure() : lo(0), hi(0) {}
  Enclosure(Rat point) : lo(point), hi(std::move(point)) {}
  Enclosure(Rat l, Rat h);

  Rat width() const { return hi - lo; }
  bool contains(const Rat& v) const { return lo <= v && v <= hi; }
  bool is_point() const { return lo == hi; }

  Enclosure operator+(const Enclosure& o) const;
  Enclosure operator*(const Enclosure& o) const;  // requires both >= 0
  Enclosure scaled(const Rat& c) const;           // requires c >= 0
  std::string str() const;
};

// Largest multiple of 2^-frac_bits that is <= sqrt(q). Requires q >= 0.
Rat sqrt_down(const Rat& q, int frac_bits);
// Smallest multiple of 2^-frac_bits that is >= sqrt(q); exact when q is a
// perfect square of a representable dyadic.
Rat sqrt_up(const Rat& q, int frac_bits);

Enclosure sqrt_enclosure(const Enclosure& q, int frac_bits);

// Enclosure of q^(p_num/p_den) for q >= 0 and p_den >= 1. 0^0 is rejected;
// 0^positive = 0.
Enclosure pow_enclosure(const Rat& q, long p_num, long p_den, int frac_bits);

// Enclosure of log_base(y) for integers base >= 2 and y >= 1, computed by
// the squaring digit algorithm with outward dyadic rounding. Exact (point
// enclosure) when y is an integer power of base.
Enclosure log_enclosure(const Int& base, const Int& y, int frac_bits);

// Enclosure of q^e where the exponent is itself an enclosure. Requires
// q >= 0; for q = 0 the convention 0^e = 0 applies (e.lo must be > 0).
Enclosure pow_enclosure(const Rat& q, const Enclosure& e, int frac_bits);

// Three-valued outcome of a certified comparison.
enum class Verdict { True, False, Undecided };

// Decides lhs < rhs when the enclosures separate, Undecided otherwise.
Verdict less_than(const Enclosure& lhs, const Rat& rhs);

std::string verdict_str(Verdict v);

}  // namespace mtn
