#include "mtn/interval.hpp"

#include <cassert>
#include <stdexcept>

namespace mtn {

namespace {

Rat dyadic(const Int& a, int frac_bits) {
  Rat q(a, Int(1) << frac_bits);
  q.canonicalize();
  return q;
}

// floor(q * 2^bits) / 2^bits
Rat round_down(const Rat& q, int bits) {
  Int scaled;
  Int num = q.get_num() << bits;
  mpz_fdiv_q(scaled.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  return dyadic(scaled, bits);
}

Rat round_up(const Rat& q, int bits) {
  Int scaled;
  Int num = q.get_num() << bits;
  mpz_cdiv_q(scaled.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  return dyadic(scaled, bits);
}

// Largest integer a with (a/2^bits)^k <= r, for r >= 0, k >= 1.
Int root_floor_scaled(const Rat& r, unsigned long k, int bits) {
  if (r == 0) return 0;
  const Int& num = r.get_num();
  const Int& den = r.get_den();
  // rhs = num * 2^(bits*k); test a^k * den <= rhs
  Int rhs = num << (static_cast<unsigned long>(bits) * k);
  Int lo = 0;
  Int hi = (num / den + 2) << bits;  // r^(1/k) <= max(1, r) < num/den + 2
  while (lo < hi) {
    Int mid = (lo + hi + 1) / 2;
    if (int_pow(mid, k) * den <= rhs)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

struct DyadicExp {
  Int scaled;  // exponent = scaled / 2^frac_bits, may be negative
  int frac_bits;
};

DyadicExp dyadicize_down(const Rat& e, int bits) {
  Int s;
  Int num = e.get_num() << bits;
  mpz_fdiv_q(s.get_mpz_t(), num.get_mpz_t(), e.get_den().get_mpz_t());
  return {s, bits};
}

DyadicExp dyadicize_up(const Rat& e, int bits) {
  Int s;
  Int num = e.get_num() << bits;
  mpz_cdiv_q(s.get_mpz_t(), num.get_mpz_t(), e.get_den().get_mpz_t());
  return {s, bits};
}

// t^e with directed rounding, t > 0 rational, e dyadic. `down` selects the
// rounding direction of every intermediate square root and product.
Rat pow_dyadic(const Rat& t, const DyadicExp& e, int prec, bool down) {
  Int two_m = Int(1) << e.frac_bits;
  Int zfloor;
  mpz_fdiv_q(zfloor.get_mpz_t(), e.scaled.get_mpz_t(), two_m.get_mpz_t());
  Int frac = e.scaled - zfloor * two_m;  // in [0, 2^m)
  if (!zfloor.fits_slong_p())
    throw std::overflow_error("pow_dyadic: integer exponent out of range");
  long z = zfloor.get_si();
  Rat acc = z >= 0 ? rat_pow_int(t, static_cast<unsigned long>(z))
                   : Rat(1) / rat_pow_int(t, static_cast<unsigned long>(-z));
  Rat r = t;
  for (int i = 1; i <= e.frac_bits; ++i) {
    if (frac == 0) break;
    r = down ? sqrt_down(r, prec) : sqrt_up(r, prec);
    if (mpz_tstbit(frac.get_mpz_t(), e.frac_bits - i)) {
      acc *= r;
      acc = down ? round_down(acc, prec) : round_up(acc, prec);
      mpz_clrbit(frac.get_mpz_t(), e.frac_bits - i);
    }
  }
  return acc;
}

}  // namespace

Enclosure::Enclosure(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo > hi) throw std::invalid_argument("Enclosure: lo > hi");
}

Enclosure Enclosure::operator+(const Enclosure& o) const {
  return {lo + o.lo, hi + o.hi};
}

Enclosure Enclosure::operator*(const Enclosure& o) const {
  assert(lo >= 0 && o.lo >= 0);
  return {lo * o.lo, hi * o.hi};
}

Enclosure Enclosure::scaled(const Rat& c) const {
  assert(c >= 0);
  return {lo * c, hi * c};
}

std::string Enclosure::str() const {
  return "[" + rat_str(lo) + ", " + rat_str(hi) + "]";
}

Rat sqrt_down(const Rat& q, int frac_bits) {
  if (q < 0) throw std::domain_error("sqrt_down: negative argument");
  // floor(2^bits * sqrt(num/den)) = floor(isqrt(4^bits * num * den) / den)
  Int t = (q.get_num() * q.get_den()) << (2 * frac_bits);
  Int s;
  mpz_sqrt(s.get_mpz_t(), t.get_mpz_t());
  Int a;
  mpz_fdiv_q(a.get_mpz_t(), s.get_mpz_t(), q.get_den().get_mpz_t());
  return dyadic(a, frac_bits);
}

Rat sqrt_up(const Rat& q, int frac_bits) {
  Rat d = sqrt_down(q, frac_bits);
  if (d * d == q) return d;
  return d + dyadic(1, frac_bits);
}

Enclosure sqrt_enclosure(const Enclosure& q, int frac_bits) {
  return {sqrt_down(q.lo, frac_bits), sqrt_up(q.hi, frac_bits)};
}

Enclosure pow_enclosure(const Rat& q, long p_num, long p_den, int frac_bits) {
  if (p_den < 1) throw std::invalid_argument("pow_enclosure: p_den < 1");
  if (q < 0) throw std::domain_error("pow_enclosure: negative base");
  if (q == 0) {
    if (p_num <= 0) throw std::domain_error("pow_enclosure: 0^nonpositive");
    return Enclosure(Rat(0));
  }
  if (p_num == 0) return Enclosure(Rat(1));
  bool invert = p_num < 0;
  unsigned long pn = invert ? -p_num : p_num;
  Rat r = rat_pow_int(q, pn);
  unsigned long k = static_cast<unsigned long>(p_den);
  Int a = root_floor_scaled(r, k, frac_bits);
  Rat lo = dyadic(a, frac_bits);
  Rat hi = rat_pow_int(lo, k) == r ? lo : dyadic(a + 1, frac_bits);
  if (invert) {
    if (lo == 0) throw std::domain_error("pow_enclosure: reciprocal of zero");
    return {Rat(1) / hi, Rat(1) / lo};
  }
  return {lo, hi};
}

Enclosure log_enclosure(const Int& base, const Int& y, int frac_bits) {
  if (base < 2 || y < 1) throw std::domain_error("log_enclosure: bad inputs");
  long n = 0;
  Int p(1);
  while (p * base <= y) {
    p *= base;
    ++n;
  }
  if (p == y) return Enclosure(Rat(n));
  const int prec = frac_bits + 8;
  Rat b(base);
  Rat xl(y, p), xh(y, p);
  xl.canonicalize();
  xh.canonicalize();
  Rat slo(n);
  Rat bit(1, 2);
  for (int i = 1; i <= frac_bits; ++i) {
    xl = round_down(xl * xl, prec);
    xh = round_up(xh * xh, prec);
    if (xh < b) {
      // bit is 0
    } else if (xl >= b) {
      slo += bit;
      xl = round_down(xl / b, prec);
      xh = round_up(xh / b, prec);
    } else {
      // Cannot certify this bit at the working precision.
      return {slo, slo + bit * 2};
    }
    bit /= 2;
  }
  return {slo, slo + bit * 2};
}

Enclosure pow_enclosure(const Rat& q, const Enclosure& e, int frac_bits) {
  if (q < 0) throw std::domain_error("pow_enclosure: negative base");
  if (q == 0) {
    if (e.lo <= 0) throw std::domain_error("pow_enclosure: 0^nonpositive");
    return Enclosure(Rat(0));
  }
  if (q == 1) return Enclosure(Rat(1));
  const int prec = frac_bits + 8;
  if (q > 1) {
    return {pow_dyadic(q, dyadicize_down(e.lo, prec), prec, true),
            pow_dyadic(q, dyadicize_up(e.hi, prec), prec, false)};
  }
  return {pow_dyadic(q, dyadicize_up(e.hi, prec), prec, true),
          pow_dyadic(q, dyadicize_down(e.lo, prec), prec, false)};
}

Verdict less_than(const Enclosure& lhs, const Rat& rhs) {
  if (lhs.hi < rhs) return Verdict::True;
  if (lhs.lo >= rhs) return Verdict::False;
  return Verdict::Undecided;
}

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    default:
      return "undecided";
  }
}

}  // namespace mtn
