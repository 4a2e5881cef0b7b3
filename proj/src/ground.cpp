#include "mtn/ground.hpp"

#include <algorithm>
#include <sstream>

namespace mtn {

FiniteVector FiniteVector::unit(long coord, Rat value) {
  FiniteVector v;
  v.set(coord, value);
  return v;
}

FiniteVector FiniteVector::parse(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  std::vector<std::string> toks;
  while (in >> tok) toks.push_back(tok);
  bool indexed = !toks.empty() && toks[0].find(':') != std::string::npos;
  FiniteVector v;
  long next = 1;
  for (const auto& t : toks) {
    auto colon = t.find(':');
    if ((colon != std::string::npos) != indexed)
      throw ValidationError("vector: cannot mix indexed and positional entries");
    long coord;
    std::string val;
    if (indexed) {
      try {
        size_t used = 0;
        coord = std::stol(t.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
      } catch (...) {
        throw ValidationError("vector: bad coordinate index in '" + t + "'");
      }
      if (coord < 1) throw ValidationError("vector: coordinates start at 1");
      val = t.substr(colon + 1);
    } else {
      coord = next++;
      val = t;
    }
    auto q = parse_rational(val);
    if (!q) throw ValidationError("vector: bad rational '" + val + "'");
    if (v.entries.count(coord))
      throw ValidationError("vector: duplicate coordinate");
    v.set(coord, *q);
  }
  return v;
}

void FiniteVector::set(long coord, const Rat& value) {
  if (value == 0)
    entries.erase(coord);
  else
    entries[coord] = value;
}

Rat FiniteVector::get(long coord) const {
  auto it = entries.find(coord);
  return it == entries.end() ? Rat(0) : it->second;
}

long FiniteVector::min_coord() const { return entries.begin()->first; }
long FiniteVector::max_coord() const { return entries.rbegin()->first; }

Rat FiniteVector::l1() const {
  Rat s(0);
  for (const auto& [k, v] : entries) s += rat_abs(v);
  return s;
}

Rat FiniteVector::linf() const {
  Rat s(0);
  for (const auto& [k, v] : entries) s = std::max(s, rat_abs(v));
  return s;
}

FiniteVector FiniteVector::restricted(long a, long b) const {
  FiniteVector out;
  for (const auto& [k, v] : entries)
    if (a <= k && k <= b) out.entries.emplace(k, v);
  return out;
}

FiniteVector FiniteVector::scaled(const Rat& c) const {
  FiniteVector out;
  if (c == 0) return out;
  for (const auto& [k, v] : entries) out.entries.emplace(k, v * c);
  return out;
}

FiniteVector FiniteVector::plus(const FiniteVector& o) const {
  FiniteVector out = *this;
  for (const auto& [k, v] : o.entries) out.set(k, out.get(k) + v);
  return out;
}

std::string FiniteVector::str() const {
  std::string out;
  for (const auto& [k, v] : entries) {
    if (!out.empty()) out += " ";
    out += std::to_string(k) + ":" + rat_str(v);
  }
  return out.empty() ? "0" : out;
}

Partition Partition::round_robin(int dim) {
  Partition p;
  for (int i = 1; i <= dim; ++i) p.period.push_back(i);
  return p;
}

int Partition::class_of(long coord) const {
  return period[static_cast<size_t>((coord - 1) % period.size())];
}

long Partition::coord_of_class(int cls, long k) const {
  std::vector<long> pos;
  for (size_t p = 0; p < period.size(); ++p)
    if (period[p] == cls) pos.push_back(static_cast<long>(p));
  long cycle = (k - 1) / static_cast<long>(pos.size());
  long idx = (k - 1) % static_cast<long>(pos.size());
  return cycle * static_cast<long>(period.size()) + pos[idx] + 1;
}

void Partition::validate(int dim) const {
  if (period.empty()) throw ValidationError("partition: empty period");
  std::vector<bool> seen(dim + 1, false);
  for (int c : period) {
    if (c < 1 || c > dim)
      throw ValidationError("partition: class out of range");
    seen[c] = true;
  }
  for (int i = 1; i <= dim; ++i)
    if (!seen[i])
      throw ValidationError(
          "partition: class " + std::to_string(i) +
          " never occurs (every class must be infinite)");
}

bool Partition::is_round_robin(int dim) const {
  if (static_cast<int>(period.size()) != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (period[i] != i + 1) return false;
  return true;
}

namespace {

int rank_of(std::vector<std::vector<Rat>> rows) {
  if (rows.empty()) return 0;
  size_t cols = rows[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows.size(); ++c) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat factor = rows[i][c] / rows[r][c];
      for (size_t j = c; j < cols; ++j) rows[i][j] -= factor * rows[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

}  // namespace

bool in_convex_hull(const std::vector<std::vector<Rat>>& points,
                    const std::vector<Rat>& v) {
  if (points.empty()) return false;
  const size_t d = v.size();
  const size_t mc = points.size();
  const size_t rows = d + 1;
  const size_t cols = mc + rows;  // original variables + artificials

  // Equations: sum_i c_i * P_i = v, sum_i c_i = 1; then b >= 0 by negation.
  std::vector<std::vector<Rat>> tab(rows, std::vector<Rat>(cols + 1, Rat(0)));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t j = 0; j < mc; ++j)
      tab[r][j] = r < d ? points[j][r] : Rat(1);
    tab[r][cols] = r < d ? v[r] : Rat(1);
    if (tab[r][cols] < 0)
      for (auto& q : tab[r]) q = -q;
    tab[r][mc + r] = 1;
  }
  std::vector<size_t> basis(rows);
  for (size_t r = 0; r < rows; ++r) basis[r] = mc + r;

  auto artificial = [&](size_t col) { return col >= mc; };

  while (true) {
    // Reduced cost of column j: cost_j - sum over rows with artificial
    // basics of tab[r][j] (artificials cost 1, originals 0).
    size_t enter = cols;
    for (size_t j = 0; j < cols && enter == cols; ++j) {
      bool basic = false;
      for (size_t r = 0; r < rows; ++r) basic = basic || basis[r] == j;
      if (basic) continue;
      Rat red = artificial(j) ? Rat(1) : Rat(0);
      for (size_t r = 0; r < rows; ++r)
        if (artificial(basis[r])) red -= tab[r][j];
      if (red < 0) enter = j;  // Bland: first improving column
    }
    if (enter == cols) break;
    size_t leave = rows;
    Rat best;
    for (size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] <= 0) continue;
      Rat ratio = tab[r][cols] / tab[r][enter];
      if (leave == rows || ratio < best ||
          (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == rows) return false;  // unbounded; cannot happen here
    Rat piv = tab[leave][enter];
    for (auto& q : tab[leave]) q /= piv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == leave || tab[r][enter] == 0) continue;
      Rat f = tab[r][enter];
      for (size_t j = 0; j <= cols; ++j) tab[r][j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }

  Rat infeasibility(0);
  for (size_t r = 0; r < rows; ++r)
    if (artificial(basis[r])) infeasibility += tab[r][cols];
  return infeasibility == 0;
}

void GroundSpace::validate() const {
  if (dim < 1) throw ValidationError("ground: dim must be >= 1");
  if (norming_set.empty())
    throw ValidationError("ground: empty norming set");
  for (const auto& f : norming_set)
    if (static_cast<int>(f.size()) != dim)
      throw ValidationError("ground: functional length != dim");
  partition.validate(dim);

  for (const auto& f : norming_set) {
    std::vector<Rat> neg(f.size());
    for (size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
    if (std::find(norming_set.begin(), norming_set.end(), neg) ==
        norming_set.end())
      throw ValidationError("ground: norming set not symmetric");
  }

  if (rank_of(norming_set) != dim)
    throw ValidationError("ground: norming set does not span the dual");

  for (int i = 0; i < dim; ++i) {
    Rat mx = norming_set[0][i];
    for (const auto& f : norming_set) mx = std::max(mx, f[i]);
    if (mx != 1)
      throw ValidationError(
          "ground: direction " + std::to_string(i + 1) +
          " not normalized (max coefficient must be 1)");
  }

  // Interval restrictions of every functional must stay inside the ball.
  for (size_t fi = 0; fi < norming_set.size(); ++fi) {
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        if (a == 0 && b == dim - 1) continue;
        std::vector<Rat> r(dim, Rat(0));
        for (int i = a; i <= b; ++i) r[i] = norming_set[fi][i];
        if (!in_convex_hull(norming_set, r))
          throw ValidationError(
              "ground: functional " + std::to_string(fi + 1) +
              " restricted to [" + std::to_string(a + 1) + "," +
              std::to_string(b + 1) + "] leaves the ball (not bimonotone)");
      }
    }
  }
}

Rat GroundFunctional::evaluate(const GroundSpace& space,
                               const FiniteVector& x) const {
  Rat s(0);
  for (const auto& [k, v] : x.entries)
    if (a <= k && k <= b) s += coeffs[space.partition.class_of(k) - 1] * v;
  return s;
}

void GroundFunctional::validate(const GroundSpace& space) const {
  if (static_cast<int>(coeffs.size()) != space.dim)
    throw ValidationError("ground functional: wrong coefficient count");
  if (!in_convex_hull(space.norming_set, coeffs))
    throw ValidationError("ground functional: coefficients outside dual ball");
}

Rat z_norm(const GroundSpace& space, const std::vector<Rat>& z) {
  if (static_cast<int>(z.size()) != space.dim)
    throw ValidationError("z_norm: dimension mismatch");
  Rat best(0);
  bool first = true;
  for (const auto& f : space.norming_set) {
    Rat v(0);
    for (int i = 0; i < space.dim; ++i) v += f[i] * z[i];
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

std::vector<Rat> quotient_apply(const GroundSpace& space,
                                const FiniteVector& x) {
  std::vector<Rat> out(space.dim, Rat(0));
  for (const auto& [k, v] : x.entries)
    out[space.partition.class_of(k) - 1] += v;
  return out;
}

std::pair<Rat, GroundFunctional> ground_norm_witness(const GroundSpace& space,
                                                     const FiniteVector& x) {
  GroundFunctional best;
  best.a = 1;
  best.b = 1;
  best.coeffs.assign(space.dim, Rat(0));
  Rat best_val(0);
  if (x.empty()) return {best_val, best};
  std::vector<long> coords;
  for (const auto& [k, v] : x.entries) coords.push_back(k);
  const size_t n = coords.size();
  for (size_t i = 0; i < n; ++i) {
    std::vector<Rat> sums(space.dim, Rat(0));
    for (size_t j = i; j < n; ++j) {
      long k = coords[j];
      sums[space.partition.class_of(k) - 1] += x.entries.at(k);
      for (const auto& f : space.norming_set) {
        Rat v(0);
        for (int c = 0; c < space.dim; ++c) v += f[c] * sums[c];
        if (v > best_val) {
          best_val = v;
          best.a = coords[i];
          best.b = k;
          best.coeffs = f;
        }
      }
    }
  }
  return {best_val, best};
}

Rat ground_norm(const GroundSpace& space, const FiniteVector& x) {
  return ground_norm_witness(space, x).first;
}

FiniteVector lift_isometric(const GroundSpace& space,
                            const std::vector<Rat>& z,
                            const std::vector<long>& reps) {
  if (static_cast<int>(z.size()) != space.dim ||
      static_cast<int>(reps.size()) != space.dim)
    throw ValidationError("lift: dimension mismatch");
  for (int i = 0; i < space.dim; ++i) {
    if (reps[i] < 1 || space.partition.class_of(reps[i]) != i + 1)
      throw ValidationError("lift: representative " + std::to_string(reps[i]) +
                            " not in class " + std::to_string(i + 1));
    if (i > 0 && reps[i] <= reps[i - 1])
      throw ValidationError(
          "lift: representatives must be strictly increasing");
  }
  FiniteVector y;
  for (int i = 0; i < space.dim; ++i) y.set(reps[i], z[i]);
  return y;
}

Enclosure zx_norm(const NormOracle& oracle, size_t count,
                  const std::vector<Rat>& a) {
  if (a.size() != count) throw ValidationError("zx_norm: length mismatch");
  Enclosure best(Rat(0));
  for (size_t i = 0; i < count; ++i) {
    for (size_t j = i; j < count; ++j) {
      std::vector<Rat> c(count, Rat(0));
      bool nonzero = false;
      for (size_t k = i; k <= j; ++k) {
        c[k] = a[k];
        nonzero = nonzero || a[k] != 0;
      }
      if (!nonzero) continue;
      Enclosure e = oracle(c);
      best.lo = std::max(best.lo, e.lo);
      best.hi = std::max(best.hi, e.hi);
    }
  }
  return best;
}

}  // namespace mtn
