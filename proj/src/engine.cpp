#include "mtn/engine.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace mtn {

Enclosure NormTable::root() const {
  if (support.empty()) return Enclosure(Rat(0));
  return window(0, support.size() - 1);
}

namespace {

using Table = std::vector<std::vector<Rat>>;  // t[i][j-i]

struct Sweeper {
  const WeightConfig& cfg;
  const GroundSpace& space;
  const FiniteVector& x;  // normalized to l1 = 1
  bool extended;
  int bits;

  std::vector<long> coords;
  size_t n = 0;
  Table ground;  // g(i,j): ground norm of the window
  Table l1;      // l1 norm of the window
  Rat tail2;     // sum_{j>J} 1/m_j^2 when extended, else 0

  std::vector<Table> lower;  // one table per completed sweep, [0] = ground
  Table upper;

  Sweeper(const WeightConfig& c, const GroundSpace& s, const FiniteVector& v,
          bool ext, int sqrt_bits)
      : cfg(c), space(s), x(v), extended(ext), bits(sqrt_bits) {
    for (const auto& [k, q] : x.entries) coords.push_back(k);
    n = coords.size();
    tail2 = Rat(0);
    if (extended) {
      auto t = cfg.inv_m2_tail();
      if (t) tail2 = *t;
    }
    init_tables();
  }

  Rat& at(Table& t, size_t i, size_t j) { return t[i][j - i]; }
  const Rat& at(const Table& t, size_t i, size_t j) const {
    return t[i][j - i];
  }

  FiniteVector window_vec(size_t i, size_t j) const {
    return x.restricted(coords[i], coords[j]);
  }

  void init_tables() {
    auto blank = [&] {
      Table t(n);
      for (size_t i = 0; i < n; ++i) t[i].assign(n - i, Rat(0));
      return t;
    };
    ground = blank();
    l1 = blank();
    for (size_t i = 0; i < n; ++i) {
      std::vector<Rat> sums(space.dim, Rat(0));
      Rat ell(0);
      for (size_t j = i; j < n; ++j) {
        const Rat& v = x.entries.at(coords[j]);
        sums[space.partition.class_of(coords[j]) - 1] += v;
        ell += rat_abs(v);
        at(l1, i, j) = ell;
        Rat q = z_norm(space, sums);
        at(ground, i, j) = q;
      }
    }
    // ground norm = max over subwindows; close under subwindow maxima
    for (size_t len = 2; len <= n; ++len)
      for (size_t i = 0; i + len <= n; ++i) {
        size_t j = i + len - 1;
        at(ground, i, j) = std::max(
            {at(ground, i, j), at(ground, i, j - 1), at(ground, i + 1, j)});
      }
    lower.push_back(ground);
    upper = l1;
  }

  // Best sums over partitions of window (i, j) into exactly p >= 2 parts,
  // reading part values from `cur` (all parts are strictly smaller windows).
  // bestp[p] for p in [2, len]; bestp[1] is filled by the caller from the
  // previous sweep (self-reference).
  std::vector<Rat> partition_bests(const Table& cur, size_t i, size_t j) {
    size_t len = j - i + 1;
    std::vector<Rat> bestp(len + 1, Rat(0));
    if (len < 2) return bestp;
    // D[p][e]: best partition of (i .. i+e) into exactly p parts; the full
    // window itself never occurs as a part here.
    std::vector<std::vector<Rat>> D(len + 1, std::vector<Rat>(len, Rat(0)));
    for (size_t e = 0; e + 1 < len; ++e) D[1][e] = at(cur, i, i + e);
    for (size_t p = 2; p <= len; ++p) {
      for (size_t e = p - 1; e < len; ++e) {
        bool any = false;
        Rat best(0);
        for (size_t m = p - 2; m < e; ++m) {
          Rat v = D[p - 1][m] + at(cur, i + m + 1, i + e);
          if (!any || v > best) {
            best = v;
            any = true;
          }
        }
        D[p][e] = best;
      }
      bestp[p] = D[p][len - 1];
    }
    return bestp;
  }

  // One sweep over `next`, reading self-references from `prev` and smaller
  // windows from `next` (already updated, ascending window length). `down`
  // selects the rounding direction; tails only enter on the upper side.
  void sweep(const Table& prev, Table& next, bool down) {
    for (size_t len = 1; len <= n; ++len) {
      for (size_t i = 0; i + len <= n; ++i) {
        size_t j = i + len - 1;
        auto bestp = partition_bests(next, i, j);
        Rat c2(0);
        for (int w = 1; w <= cfg.levels(); ++w) {
          Rat pm = at(prev, i, j);  // one part: the window itself
          long cap = std::min<long>(cfg.n_at(w), static_cast<long>(len));
          for (long p = 2; p <= cap; ++p)
            pm = std::max(pm, bestp[static_cast<size_t>(p)]);
          Rat wj = pm / cfg.m_at(w);
          c2 += wj * wj;
        }
        if (!down && tail2 != 0) c2 += at(l1, i, j) * at(l1, i, j) * tail2;
        Rat c = down ? sqrt_down(c2, bits) : sqrt_up(c2, bits);
        at(next, i, j) = std::max(at(ground, i, j), c);
      }
    }
  }

  void lower_sweep() {
    Table next = lower.back();
    sweep(lower.back(), next, true);
    lower.push_back(std::move(next));
  }

  void upper_sweep() {
    Table next = upper;
    sweep(upper, next, false);
    upper = std::move(next);
  }

  // ----- witness extraction ---------------------------------------------

  std::map<std::tuple<size_t, size_t, size_t>, std::pair<Rat, TreePtr>> memo;

  std::pair<Rat, TreePtr> witness(size_t i, size_t j, size_t k) {
    auto key = std::make_tuple(i, j, k);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const Table& L = lower[k];
    Rat val = at(L, i, j);
    std::pair<Rat, TreePtr> out;
    if (k == 0 || val == at(ground, i, j)) {
      auto [gv, gf] = ground_norm_witness(space, window_vec(i, j));
      out = {gv, FunctionalTree::make_ground(gf)};
    } else {
      out = convex_witness(i, j, k);
      // never settle below the ground functional
      if (out.first < at(ground, i, j)) {
        auto [gv, gf] = ground_norm_witness(space, window_vec(i, j));
        out = {gv, FunctionalTree::make_ground(gf)};
      }
    }
    memo.emplace(key, out);
    return out;
  }

  // Rebuilds, for one weight, the argmax partition the sweep saw: smallest
  // part count first, then earliest split points; self-reference only when
  // no proper partition attains the value.
  std::vector<std::pair<size_t, size_t>> argmax_partition(size_t i, size_t j,
                                                          size_t k, long cap,
                                                          const Rat& target) {
    const Table& L = lower[k];
    for (long p = 2; p <= cap; ++p) {
      auto parts = exact_partition(L, i, j, static_cast<size_t>(p), target);
      if (!parts.empty()) return parts;
    }
    return {{i, j}};
  }

  // Finds a partition of (i, j) into exactly p parts whose current-sweep
  // values sum to `target`, choosing the earliest viable first part.
  std::vector<std::pair<size_t, size_t>> exact_partition(const Table& L,
                                                         size_t i, size_t j,
                                                         size_t p,
                                                         const Rat& target) {
    if (p == 1) {
      if (at(L, i, j) == target) return {{i, j}};
      return {};
    }
    for (size_t e = i; e + (p - 1) <= j; ++e) {
      Rat head = at(L, i, e);
      auto rest = exact_partition(L, e + 1, j, p - 1, target - head);
      if (!rest.empty()) {
        rest.insert(rest.begin(), {i, e});
        return rest;
      }
    }
    return {};
  }

  std::pair<Rat, TreePtr> convex_witness(size_t i, size_t j, size_t k) {
    size_t len = j - i + 1;
    std::vector<Rat> vals(cfg.levels() + 1, Rat(0));
    std::vector<TreePtr> weighted(cfg.levels() + 1);
    auto bestp = partition_bests(lower[k], i, j);
    for (int w = 1; w <= cfg.levels(); ++w) {
      // value the sweep computed for this weight
      Rat pm = at(lower[k - 1], i, j);
      long cap = std::min<long>(cfg.n_at(w), static_cast<long>(len));
      for (long p = 2; p <= cap; ++p)
        pm = std::max(pm, bestp[static_cast<size_t>(p)]);
      auto parts = argmax_partition(i, j, k, cap, pm);
      std::vector<TreePtr> children;
      Rat sum(0);
      for (auto [a, b] : parts) {
        auto [v, t] =
            (parts.size() == 1 && a == i && b == j) ? witness(i, j, k - 1)
                                                    : witness(a, b, k);
        children.push_back(t);
        sum += v;
      }
      vals[w] = sum / cfg.m_at(w);
      weighted[w] = FunctionalTree::make_weighted(w, std::move(children));
    }
    Rat s2(0);
    for (int w = 1; w <= cfg.levels(); ++w) s2 += vals[w] * vals[w];
    if (s2 == 0) return {Rat(0), FunctionalTree::zero()};

    const Rat table_val = at(lower[k], i, j);
    Rat lam_den;  // rational r >= sqrt(s2) with s2/r >= achieved target
    Int sq_num, sq_den;
    if (mpz_perfect_square_p(s2.get_num().get_mpz_t()) &&
        mpz_perfect_square_p(s2.get_den().get_mpz_t())) {
      mpz_sqrt(sq_num.get_mpz_t(), s2.get_num().get_mpz_t());
      mpz_sqrt(sq_den.get_mpz_t(), s2.get_den().get_mpz_t());
      lam_den = Rat(sq_num, sq_den);
      lam_den.canonicalize();
    } else {
      // sqrt(s2) is irrational, so table_val < sqrt(s2) strictly and a
      // fine enough upper approximation r keeps s2/r >= table_val.
      int p = 16;
      while (true) {
        lam_den = sqrt_up(s2, p);
        if (table_val <= 0 || lam_den * table_val <= s2) break;
        p *= 2;
      }
    }
    std::vector<ConvexTerm> terms;
    Rat value(0);
    for (int w = 1; w <= cfg.levels(); ++w) {
      if (vals[w] == 0) continue;
      Rat lam = vals[w] / lam_den;
      terms.push_back({w, lam, weighted[w]});
      value += lam * vals[w];
    }
    return {value, FunctionalTree::make_convex(std::move(terms))};
  }
};

int default_sqrt_bits(const Rat& normalized_target) {
  // keep the per-sweep rounding two orders of magnitude under the target
  Rat inv = Rat(512) / normalized_target;
  int bits = static_cast<int>(
      mpz_sizeinbase(Int(inv.get_num() / inv.get_den() + 1).get_mpz_t(), 2));
  return std::clamp(bits, 32, 4096);
}

}  // namespace

NormResult norm(const WeightConfig& cfg, const GroundSpace& space,
                const FiniteVector& x, const Rat& target_width,
                const EngineOptions& opts) {
  cfg.validate();
  if (target_width <= 0)
    throw ValidationError("norm: target width must be positive");
  if (opts.extended && cfg.tail == TailRule::None)
    throw ValidationError(
        "norm: extended mode needs a declared tail rule; with tail_rule "
        "\"none\" only the truncated space is defined");
  Rat rho2 = cfg.rho_squared(opts.extended);
  if (rho2 >= 1)
    throw ValidationError(
        "norm: contraction requires sum 1/m_j^2 < 1 (got " + rat_str(rho2) +
        ")");

  NormResult out;
  if (x.empty()) {
    out.enclosure = Enclosure(Rat(0));
    out.witness = FunctionalTree::zero();
    out.witness_value = Rat(0);
    out.table.sweeps = 0;
    return out;
  }

  const Rat scale = x.l1();
  const FiniteVector xn = x.scaled(Rat(1) / scale);
  const Rat goal = target_width / scale;

  int bits = opts.sqrt_bits > 0 ? opts.sqrt_bits : default_sqrt_bits(goal);
  Sweeper sw(cfg, space, xn, opts.extended, bits);

  int max_sweeps = opts.max_sweeps;
  if (max_sweeps <= 0) {
    // smallest k with rho^k <= goal/2, plus slack for rounding
    max_sweeps = 8;
    Rat p(1);
    while (p * p * 4 > goal * goal && max_sweeps < 100000) {
      p *= rho2;  // p = rho^(2k) compared against (goal/2)^2
      ++max_sweeps;
    }
  }

  size_t root_i = 0, root_j = sw.n - 1;
  bool reached = false;
  int k = 0;
  for (; k < max_sweeps; ++k) {
    sw.lower_sweep();
    sw.upper_sweep();
    Rat width =
        sw.at(sw.upper, root_i, root_j) - sw.at(sw.lower.back(), root_i, root_j);
    if (opts.trace) out.table.root_widths.push_back(width * scale);
    if (width <= goal) {
      reached = true;
      ++k;
      break;
    }
  }

  auto [wv, wt] = sw.witness(root_i, root_j, sw.lower.size() - 1);

  out.table.support = sw.coords;
  out.table.sweeps = k;
  out.table.width_reached = reached;
  out.table.cell.resize(sw.n);
  for (size_t i = 0; i < sw.n; ++i) {
    out.table.cell[i].reserve(sw.n - i);
    for (size_t j = i; j < sw.n; ++j)
      out.table.cell[i].emplace_back(sw.at(sw.lower.back(), i, j) * scale,
                                     sw.at(sw.upper, i, j) * scale);
  }
  out.witness = wt;
  out.witness_value = wv * scale;
  out.enclosure =
      Enclosure(out.witness_value, sw.at(sw.upper, root_i, root_j) * scale);
  return out;
}

std::pair<Rat, TreePtr> norm_lower_witness(const WeightConfig& cfg,
                                           const GroundSpace& space,
                                           const FiniteVector& x,
                                           int budget_sweeps) {
  cfg.validate();
  if (x.empty()) return {Rat(0), FunctionalTree::zero()};
  const Rat scale = x.l1();
  const FiniteVector xn = x.scaled(Rat(1) / scale);
  Sweeper sw(cfg, space, xn, false, 64);
  for (int k = 0; k < budget_sweeps; ++k) sw.lower_sweep();
  auto [v, t] = sw.witness(0, sw.n - 1, sw.lower.size() - 1);
  return {v * scale, t};
}

}  // namespace mtn
