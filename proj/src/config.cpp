#include "mtn/config.hpp"

namespace mtn {

void WeightConfig::validate() const {
  if (m.empty()) throw ValidationError("weights: m is empty");
  if (m.size() != n.size())
    throw ValidationError("weights: m and n have different lengths");
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 2) throw ValidationError("weights: m must be >= 2 everywhere");
    if (n[i] < 2) throw ValidationError("weights: n must be >= 2 everywhere");
    if (i > 0 && m[i] <= m[i - 1])
      throw ValidationError("weights: m must be strictly increasing");
    if (i > 0 && n[i] <= n[i - 1])
      throw ValidationError("weights: n must be strictly increasing");
  }
  if (inv_m2_prefix() >= 1)
    throw ValidationError("weights: sum of 1/m_j^2 must be < 1");
}

Rat WeightConfig::inv_m_prefix(int from) const {
  Rat s(0);
  for (int j = std::max(from, 1); j <= levels(); ++j) s += Rat(1, m_at(j));
  return s;
}

std::optional<Rat> WeightConfig::inv_m_tail() const {
  if (tail == TailRule::None) return std::nullopt;
  // sum_{k>=1} 1/(m_J 2^k) = 1/m_J
  Rat t(1, m.back());
  t.canonicalize();
  return t;
}

std::optional<Rat> WeightConfig::inv_m_from(int from) const {
  if (from <= levels()) {
    Rat s = inv_m_prefix(from);
    if (tail == TailRule::None) return s;
    return s + *inv_m_tail();
  }
  if (tail == TailRule::None) return Rat(0);
  // from > J: sum_{j>=from} 1/m_j = (1/m_J) 2^{-(from-1-J)}
  Rat s(1, m.back());
  s.canonicalize();
  int shift = from - 1 - levels();
  return s / rat_pow_int(Rat(2), static_cast<unsigned long>(shift));
}

Rat WeightConfig::inv_m2_prefix() const {
  Rat s(0);
  for (long mj : m) {
    Rat t(1, mj);
    t.canonicalize();
    s += t * t;
  }
  return s;
}

std::optional<Rat> WeightConfig::inv_m2_tail() const {
  if (tail == TailRule::None) return std::nullopt;
  // sum_{k>=1} 1/(m_J 2^k)^2 = 1/(3 m_J^2)
  Rat t(1, m.back());
  t.canonicalize();
  return t * t / 3;
}

Rat WeightConfig::rho_squared(bool extended) const {
  Rat s = inv_m2_prefix();
  if (extended) {
    auto t = inv_m2_tail();
    if (t) s += *t;
  }
  return s;
}

Enclosure WeightConfig::s_enclosure(int i, int frac_bits) const {
  return log_enclosure(Int(m_at(1)), Int(m_at(i)), frac_bits);
}

std::string evidence_str(Evidence e) {
  switch (e) {
    case Evidence::Verified:
      return "verified";
    case Evidence::Failed:
      return "failed";
    case Evidence::FiniteEvidence:
      return "finite evidence only";
    default:
      return "undecided";
  }
}

ConditionReport check_weight_conditions(const WeightConfig& cfg,
                                       const std::vector<Rat>& alphas,
                                       int frac_bits) {
  cfg.validate();
  ConditionReport rep;
  rep.scaling_sum.prefix = cfg.inv_m_prefix();
  rep.scaling_sum.tail = cfg.inv_m_tail();
  const Rat tenth(1, 10);
  if (cfg.tail == TailRule::None) {
    // Only the prefix is known; a failing prefix already settles the sum,
    // a passing one is evidence about the truncation only.
    rep.scaling_sum.verdict = rep.scaling_sum.prefix < tenth
                                  ? Evidence::FiniteEvidence
                                  : Evidence::Failed;
  } else {
    Rat total = rep.scaling_sum.prefix + *rep.scaling_sum.tail;
    rep.scaling_sum.verdict =
        total < tenth ? Evidence::Verified : Evidence::Failed;
  }

  for (int i = 2; i <= cfg.levels(); ++i) {
    Enclosure s = cfg.s_enclosure(i, frac_bits);
    Rat base(static_cast<long>(i - 1) * cfg.n_at(i - 1));
    Enclosure num = pow_enclosure(base, s, frac_bits);
    rep.growth_table.push_back(
        {i, num.scaled(Rat(1, cfg.n_at(i)))});
  }

  for (const Rat& alpha : alphas) {
    if (!alpha.get_num().fits_slong_p() || !alpha.get_den().fits_slong_p())
      throw ValidationError("alpha exponent out of range");
    for (int i = 1; i <= cfg.levels(); ++i) {
      Enclosure num = pow_enclosure(Rat(cfg.n_at(i)), alpha.get_num().get_si(),
                                    alpha.get_den().get_si(), frac_bits);
      rep.power_table.push_back(
          {alpha, i, num.scaled(Rat(1, cfg.m_at(i)))});
    }
  }
  return rep;
}

bool J0Report::all_true() const {
  return tail_sum.verdict == Verdict::True &&
         growth.verdict == Verdict::True && depth.verdict == Verdict::True;
}

J0Report check_j0_conditions(const WeightConfig& cfg, long d, int j0,
                             int frac_bits) {
  cfg.validate();
  if (j0 < 1 || j0 > cfg.levels())
    throw ValidationError("j0 out of range");
  if (d < 1) throw ValidationError("d must be >= 1");
  J0Report rep;

  {
    auto s = cfg.inv_m_from(j0);
    Rat lhs = s ? *s * Rat(2 * d) : cfg.inv_m_prefix(j0) * Rat(2 * d);
    Enclosure e(lhs);
    rep.tail_sum = {less_than(e, Rat(1, 5)), e, Rat(1, 5),
                    "sum_{j>=j0} 2d/m_j < 1/5"};
    if (!s && rep.tail_sum.verdict == Verdict::True)
      rep.tail_sum.verdict = Verdict::Undecided;  // unmodeled tail
  }

  {
    Rat rhs(1, 5 * d);
    rhs.canonicalize();
    Verdict v;
    Enclosure lhs(Rat(0));
    if (j0 == 1) {
      // (j0-1) n_{j0-1} = 0 with the convention 0^s = 0.
      v = less_than(lhs, rhs);
    } else {
      Rat base(static_cast<long>(j0 - 1) * cfg.n_at(j0 - 1));
      Rat factor(2, cfg.n_at(j0));
      factor.canonicalize();
      for (int bits = frac_bits; bits <= 4 * frac_bits; bits *= 2) {
        Enclosure s = cfg.s_enclosure(j0, bits);
        lhs = pow_enclosure(base, s, bits).scaled(factor);
        v = less_than(lhs, rhs);
        if (v != Verdict::Undecided) break;
      }
    }
    rep.growth = {v, lhs, rhs, "2((j0-1) n_{j0-1})^{s_j0} / n_j0 < 1/(5d)"};
  }

  {
    // d / 10^{s_j0} < 1/5
    Verdict v = Verdict::Undecided;
    Enclosure lhs(Rat(0));
    for (int bits = frac_bits; bits <= 4 * frac_bits; bits *= 2) {
      Enclosure s = cfg.s_enclosure(j0, bits);
      Enclosure p = pow_enclosure(Rat(10), s, bits);
      lhs = Enclosure(Rat(d) / p.hi, Rat(d) / p.lo);
      v = less_than(lhs, Rat(1, 5));
      if (v != Verdict::Undecided) break;
    }
    rep.depth = {v, lhs, Rat(1, 5), "d / 10^{s_j0} < 1/5"};
  }
  return rep;
}

}  // namespace mtn
