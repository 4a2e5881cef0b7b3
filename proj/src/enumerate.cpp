#include "mtn/enumerate.hpp"

#include <algorithm>

namespace mtn {

namespace {

std::vector<Rat> lambda_grid(long max_den) {
  std::vector<Rat> grid;
  for (long q = 1; q <= max_den; ++q) {
    for (long p = 1; p <= q; ++p) {
      Rat r(p, q);
      r.canonicalize();
      grid.push_back(r);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::reverse(grid.begin(), grid.end());  // larger coefficients first
  return grid;
}

// ---------------------------------------------------------------------
// Full stream enumeration (small inputs, guarded by the cap).
// ---------------------------------------------------------------------

struct Piece {
  TreePtr tree;
  long a, b;  // hull of the ground intervals inside
};

struct StreamEnum {
  const WeightConfig& cfg;
  const GroundSpace& space;
  const std::vector<long>& support;
  const EnumOptions& opts;
  std::vector<Rat> grid;

  StreamEnum(const WeightConfig& c, const GroundSpace& s,
             const std::vector<long>& sup, const EnumOptions& o)
      : cfg(c), space(s), support(sup), opts(o),
        grid(lambda_grid(o.lambda_max_den)) {}

  std::vector<Piece> grounds() const {
    std::vector<Piece> out;
    for (size_t i = 0; i < support.size(); ++i) {
      for (size_t j = i; j < support.size(); ++j) {
        for (const auto& f : space.norming_set) {
          GroundFunctional g;
          g.a = support[i];
          g.b = support[j];
          g.coeffs = f;
          out.push_back({FunctionalTree::make_ground(std::move(g)),
                         support[i], support[j]});
        }
      }
    }
    return out;
  }

  // Successive selections from `pool` (sorted by hull start), at most n_j.
  void weighted_rec(const std::vector<Piece>& pool, int j, size_t from,
                    long min_start, std::vector<TreePtr>& acc,
                    std::vector<std::pair<long, long>>& hulls,
                    const std::function<void(const Piece&)>& sink) const {
    if (!acc.empty()) {
      Piece p;
      p.tree = FunctionalTree::make_weighted(j, acc);
      p.a = hulls.front().first;
      p.b = hulls.back().second;
      sink(p);
    }
    if (static_cast<long>(acc.size()) >= cfg.n_at(j)) return;
    for (size_t i = from; i < pool.size(); ++i) {
      if (pool[i].a < min_start) continue;
      acc.push_back(pool[i].tree);
      hulls.push_back({pool[i].a, pool[i].b});
      weighted_rec(pool, j, i + 1, pool[i].b + 1, acc, hulls, sink);
      acc.pop_back();
      hulls.pop_back();
    }
  }

  std::vector<Piece> weighteds(const std::vector<Piece>& prev, int j) const {
    std::vector<Piece> pool = prev;
    std::sort(pool.begin(), pool.end(), [](const Piece& x, const Piece& y) {
      return x.a < y.a || (x.a == y.a && x.b < y.b);
    });
    std::vector<Piece> out;
    std::vector<TreePtr> acc;
    std::vector<std::pair<long, long>> hulls;
    weighted_rec(pool, j, 0, 0, acc, hulls,
                 [&](const Piece& p) { out.push_back(p); });
    return out;
  }

  // All grid tuples with positive entries on an index subset, sum of
  // squares at most 1, crossed with the per-index weighted choices.
  void convex_rec(const std::vector<std::vector<Piece>>& per_weight, int idx,
                  const Rat& budget, std::vector<ConvexTerm>& acc,
                  long& hull_a, long& hull_b,
                  const std::function<void(const Piece&)>& sink) const {
    if (!acc.empty()) {
      Piece p;
      p.tree = FunctionalTree::make_convex(acc);
      p.a = hull_a;
      p.b = hull_b;
      sink(p);
    }
    for (int w = idx; w <= cfg.levels(); ++w) {
      for (const Rat& lam : grid) {
        Rat used = lam * lam;
        if (used > budget) continue;
        for (const auto& piece : per_weight[w]) {
          acc.push_back({w, lam, piece.tree});
          long pa = hull_a, pb = hull_b;
          hull_a = acc.size() == 1 ? piece.a : std::min(hull_a, piece.a);
          hull_b = acc.size() == 1 ? piece.b : std::max(hull_b, piece.b);
          convex_rec(per_weight, w + 1, budget - used, acc, hull_a, hull_b,
                     sink);
          hull_a = pa;
          hull_b = pb;
          acc.pop_back();
        }
      }
    }
  }

  void run(const std::function<void(const TreePtr&)>& sink) const {
    // Counting pass, then emission.
    for (int pass = 0; pass < 2; ++pass) {
      Int count = 0;
      bool counting = pass == 0;
      auto emit = [&](const TreePtr& t) {
        if (counting) {
          ++count;
          if (count > opts.cap) throw CapExceeded(count, opts.cap);
        } else {
          sink(t);
        }
      };
      std::vector<Piece> layer = grounds();
      for (const auto& p : layer) emit(p.tree);
      for (int stage = 1; stage <= opts.depth; ++stage) {
        std::vector<std::vector<Piece>> per_weight(cfg.levels() + 1);
        for (int j = 1; j <= cfg.levels(); ++j)
          per_weight[j] = weighteds(layer, j);
        std::vector<Piece> next = layer;
        std::vector<ConvexTerm> acc;
        long ha = 0, hb = 0;
        convex_rec(per_weight, 1, Rat(1), acc, ha, hb, [&](const Piece& p) {
          emit(p.tree);
          next.push_back(p);
        });
        layer = std::move(next);
      }
    }
  }

};

// ---------------------------------------------------------------------
// Exact class maximum via per-stage tables.
// ---------------------------------------------------------------------

struct MaxTables {
  const WeightConfig& cfg;
  const GroundSpace& space;
  const FiniteVector& x;
  std::vector<Rat> grid;
  std::vector<long> coords;
  size_t n;

  using Cell = std::pair<Rat, TreePtr>;
  std::vector<std::vector<Cell>> table;  // current stage, [i][j-i]

  MaxTables(const WeightConfig& c, const GroundSpace& s, const FiniteVector& v,
            long max_den)
      : cfg(c), space(s), x(v), grid(lambda_grid(max_den)) {
    for (const auto& [k, q] : x.entries) coords.push_back(k);
    n = coords.size();
  }

  Cell& at(std::vector<std::vector<Cell>>& t, size_t i, size_t j) {
    return t[i][j - i];
  }

  void init_ground() {
    table.assign(n, {});
    for (size_t i = 0; i < n; ++i) {
      table[i].resize(n - i);
      for (size_t j = i; j < n; ++j) {
        auto [v, g] =
            ground_norm_witness(space, x.restricted(coords[i], coords[j]));
        table[i][j - i] = {v, FunctionalTree::make_ground(g)};
      }
    }
  }

  // Best grid tuple against fixed per-weight values by depth-first search
  // with the Cauchy-Schwarz bound on the open indices.
  struct GridSearch {
    const std::vector<Rat>& grid;
    std::vector<Rat> w;        // per-weight values, 1-based
    std::vector<Rat> suffix2;  // sum of w^2 from index upward
    Rat best;
    std::vector<Rat> best_lam, cur_lam;

    void run() {
      size_t J = w.size() - 1;
      suffix2.assign(J + 2, Rat(0));
      for (size_t i = J; i >= 1; --i) suffix2[i] = suffix2[i + 1] + w[i] * w[i];
      best = 0;
      best_lam.assign(J + 1, Rat(0));
      cur_lam.assign(J + 1, Rat(0));
      dfs(1, Rat(1), Rat(0));
    }

    void dfs(size_t idx, const Rat& budget, const Rat& value) {
      if (value > best) {
        best = value;
        best_lam = cur_lam;
      }
      if (idx >= suffix2.size() - 1) return;
      // value + sqrt(budget * suffix2[idx]) <= best prunes the subtree
      if (best >= value) {
        Rat slack = best - value;
        if (slack * slack >= budget * suffix2[idx]) return;
      }
      // skip this index entirely
      dfs(idx + 1, budget, value);
      for (const Rat& lam : grid) {
        Rat used = lam * lam;
        if (used > budget) continue;
        cur_lam[idx] = lam;
        dfs(idx + 1, budget - used, value + lam * w[idx]);
        cur_lam[idx] = 0;
      }
    }
  };

  std::pair<Rat, TreePtr> run(int depth) {
    init_ground();
    for (int stage = 1; stage <= depth; ++stage) {
      auto next = table;
      for (size_t len = 1; len <= n; ++len) {
        for (size_t i = 0; i + len <= n; ++i) {
          size_t j = i + len - 1;
          // per-weight partition maxima over the previous stage
          std::vector<Rat> w(cfg.levels() + 1, Rat(0));
          std::vector<std::vector<std::pair<size_t, size_t>>> parts(
              cfg.levels() + 1);
          for (int jw = 1; jw <= cfg.levels(); ++jw) {
            auto [pv, pp] = best_partition(i, j, cfg.n_at(jw));
            w[jw] = pv / cfg.m_at(jw);
            parts[jw] = pp;
          }
          GridSearch gs{grid, w, {}, Rat(0), {}, {}};
          gs.run();
          if (gs.best > at(next, i, j).first) {
            std::vector<ConvexTerm> terms;
            for (int jw = 1; jw <= cfg.levels(); ++jw) {
              if (gs.best_lam[jw] == 0) continue;
              std::vector<TreePtr> children;
              for (auto [a, b] : parts[jw])
                children.push_back(at(table, a, b).second);
              terms.push_back({jw, gs.best_lam[jw],
                               FunctionalTree::make_weighted(jw, children)});
            }
            at(next, i, j) = {gs.best,
                              FunctionalTree::make_convex(std::move(terms))};
          }
          // windows are monotone under inclusion
          if (len >= 2) {
            if (at(next, i + 1, j).first > at(next, i, j).first)
              at(next, i, j) = at(next, i + 1, j);
            if (at(next, i, j - 1).first > at(next, i, j).first)
              at(next, i, j) = at(next, i, j - 1);
          }
        }
      }
      table = std::move(next);
    }
    return table[0][n - 1];
  }

  // Max over partitions into at most `cap` parts of previous-stage values;
  // single part = the whole window at the previous stage.
  std::pair<Rat, std::vector<std::pair<size_t, size_t>>> best_partition(
      size_t i, size_t j, long cap) {
    size_t len = j - i + 1;
    long parts_cap = std::min<long>(cap, static_cast<long>(len));
    Rat best = at(table, i, j).first;
    std::vector<std::pair<size_t, size_t>> arg{{i, j}};
    if (parts_cap >= 2) {
      // D[p][e]: best split of (i..i+e) into p parts with backtracking
      std::vector<std::vector<Rat>> D(parts_cap + 1,
                                      std::vector<Rat>(len, Rat(0)));
      std::vector<std::vector<long>> back(parts_cap + 1,
                                          std::vector<long>(len, -1));
      for (size_t e = 0; e < len; ++e) D[1][e] = at(table, i, i + e).first;
      for (long p = 2; p <= parts_cap; ++p) {
        for (size_t e = static_cast<size_t>(p) - 1; e < len; ++e) {
          for (size_t m = static_cast<size_t>(p) - 2; m < e; ++m) {
            Rat v = D[p - 1][m] + at(table, i + m + 1, i + e).first;
            if (back[p][e] < 0 || v > D[p][e]) {
              D[p][e] = v;
              back[p][e] = static_cast<long>(m);
            }
          }
        }
        if (D[p][len - 1] > best) {
          best = D[p][len - 1];
          arg.clear();
          size_t e = len - 1;
          long pp = p;
          while (pp > 1) {
            size_t m = static_cast<size_t>(back[pp][e]);
            arg.push_back({i + m + 1, i + e});
            e = m;
            --pp;
          }
          arg.push_back({i, i + e});
          std::reverse(arg.begin(), arg.end());
        }
      }
    }
    return {best, arg};
  }
};

}  // namespace

void enumerate_functionals(const WeightConfig& cfg, const GroundSpace& space,
                           const std::vector<long>& support,
                           const EnumOptions& opts,
                           const std::function<void(const TreePtr&)>& sink) {
  cfg.validate();
  if (support.empty())
    throw ValidationError("enumerate: empty support");
  StreamEnum e(cfg, space, support, opts);
  e.run(sink);
}

std::pair<Rat, TreePtr> enumerate_max(const WeightConfig& cfg,
                                      const GroundSpace& space,
                                      const FiniteVector& x,
                                      const EnumOptions& opts) {
  cfg.validate();
  if (x.empty()) return {Rat(0), FunctionalTree::zero()};
  MaxTables t(cfg, space, x, opts.lambda_max_den);
  return t.run(opts.depth);
}

}  // namespace mtn
