#include "mtn/analysis.hpp"

#include <algorithm>

namespace mtn {

Ell1Report ell1_constant(const WeightConfig& cfg, const GroundSpace& space,
                         const std::vector<FiniteVector>& family,
                         const std::vector<std::vector<Rat>>& extra_grid,
                         const Rat& width, const EngineOptions& opts) {
  if (family.empty()) throw ValidationError("ell1_constant: empty family");
  const size_t k = family.size();
  if (k > 16) throw ValidationError("ell1_constant: family too large");

  std::vector<std::vector<Rat>> grid;
  for (size_t mask = 0; mask < (size_t(1) << k); ++mask) {
    std::vector<Rat> a(k);
    for (size_t i = 0; i < k; ++i) a[i] = (mask >> i) & 1 ? Rat(-1) : Rat(1);
    grid.push_back(std::move(a));
  }
  for (const auto& a : extra_grid) {
    if (a.size() != k)
      throw ValidationError("ell1_constant: grid row length mismatch");
    grid.push_back(a);
  }

  Ell1Report rep;
  bool first = true;
  for (const auto& a : grid) {
    Rat l1(0);
    FiniteVector combo;
    for (size_t i = 0; i < k; ++i) {
      l1 += rat_abs(a[i]);
      combo = combo.plus(family[i].scaled(a[i]));
    }
    if (l1 == 0) continue;
    ++rep.patterns_tested;
    Enclosure ratio;
    if (combo.empty()) {
      ratio = Enclosure(Rat(0));
    } else {
      ratio = norm(cfg, space, combo, width * l1, opts)
                  .enclosure.scaled(Rat(1) / l1);
    }
    if (first) {
      rep.constant = ratio;
      rep.arg_pattern = a;
      first = false;
    } else {
      if (ratio.hi < rep.constant.hi) rep.arg_pattern = a;
      rep.constant.lo = std::min(rep.constant.lo, ratio.lo);
      rep.constant.hi = std::min(rep.constant.hi, ratio.hi);
    }
  }
  return rep;
}

BlockGrowthReport block_growth_table(const WeightConfig& cfg,
                                     const GroundSpace& space,
                                     const std::vector<FiniteVector>& blocks,
                                     const std::vector<Rat>& p_list,
                                     const Rat& width,
                                     const EngineOptions& opts) {
  if (blocks.empty()) throw ValidationError("block_growth: no blocks");
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty())
      throw ValidationError("block_growth: blocks must be nonzero");
    if (i > 0 && blocks[i - 1].max_coord() >= blocks[i].min_coord())
      throw ValidationError("block_growth: blocks must be successive");
  }

  BlockGrowthReport rep;
  std::vector<Rat> block_values;
  std::vector<TreePtr> block_witnesses;
  rep.blocks_certified = true;
  for (const auto& b : blocks) {
    NormResult r = norm(cfg, space, b, width, opts);
    block_values.push_back(r.witness_value);
    block_witnesses.push_back(r.witness);
    rep.blocks_certified = rep.blocks_certified && r.witness_value >= 1;
  }

  FiniteVector partial;
  size_t used = 0;
  for (int j = 1; j <= cfg.levels(); ++j) {
    long nj = cfg.n_at(j);
    if (nj > static_cast<long>(blocks.size())) break;
    while (used < static_cast<size_t>(nj))
      partial = partial.plus(blocks[used++]);
    BlockGrowthRow row;
    row.level = j;
    row.count = nj;
    row.norm = norm(cfg, space, partial, width, opts).enclosure;
    row.reference = Rat(nj, cfg.m_at(j));
    row.reference.canonicalize();
    for (const Rat& p : p_list) {
      if (p <= 0) throw ValidationError("block_growth: p must be positive");
      Enclosure e = pow_enclosure(Rat(nj), p.get_den().get_si(),
                                  p.get_num().get_si(), 64);
      row.powers.emplace_back(p, e);
    }
    // explicit witness: the level-j average of the per-block witnesses
    std::vector<TreePtr> children(block_witnesses.begin(),
                                  block_witnesses.begin() + nj);
    TreePtr weighted = FunctionalTree::make_weighted(j, std::move(children));
    row.witness = FunctionalTree::make_convex({{j, Rat(1), weighted}});
    row.witness_value = evaluate(row.witness, cfg, space, partial);
    row.lower_bound_ok = !rep.blocks_certified || row.norm.lo >= row.reference;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<Enclosure> cesaro_profile(const WeightConfig& cfg,
                                      const GroundSpace& space,
                                      const std::vector<FiniteVector>& sequence,
                                      const std::vector<long>& counts,
                                      const Rat& width,
                                      const EngineOptions& opts) {
  std::vector<Enclosure> out;
  for (long c : counts) {
    if (c < 1 || c > static_cast<long>(sequence.size()))
      throw ValidationError("cesaro: count out of range");
    FiniteVector avg;
    for (long i = 0; i < c; ++i) avg = avg.plus(sequence[i]);
    avg = avg.scaled(Rat(1, c));
    if (avg.empty()) {
      out.emplace_back(Rat(0));
    } else {
      out.push_back(norm(cfg, space, avg, width, opts).enclosure);
    }
  }
  return out;
}

QuotientReport quotient_experiment(const WeightConfig& cfg,
                                   const GroundSpace& space,
                                   const std::vector<Rat>& z, int j0,
                                   const Rat& width,
                                   const EngineOptions& opts) {
  cfg.validate();
  space.validate();
  if (static_cast<int>(z.size()) != space.dim)
    throw ValidationError("quotient experiment: z has wrong length");
  if (z_norm(space, z) != 1)
    throw ValidationError("quotient experiment: z must have norm exactly 1");
  if (j0 < 1 || j0 > cfg.levels())
    throw ValidationError("quotient experiment: j0 out of range");

  QuotientReport rep;
  rep.z = z;
  rep.j0 = j0;
  rep.conditions = check_j0_conditions(cfg, space.dim, j0);
  rep.conditions_ok = rep.conditions.all_true();

  // Interlaced representatives: smallest unused coordinates with
  // l_t^1 < ... < l_t^d < l_{t+1}^1.
  const long reps_count = cfg.n_at(j0);
  long cursor = 0;
  const long period = static_cast<long>(space.partition.period.size());
  for (long t = 0; t < reps_count; ++t) {
    FiniteVector y;
    for (int i = 1; i <= space.dim; ++i) {
      long k = cursor + 1;
      while (space.partition.class_of(k) != i) {
        ++k;
        if (k > cursor + period + 1)
          throw ValidationError("quotient experiment: class never realized");
      }
      y.set(k, z[i - 1]);
      cursor = k;
    }
    rep.blocks.push_back(y);
  }
  FiniteVector x;
  for (const auto& y : rep.blocks) x = x.plus(y);
  x = x.scaled(Rat(1, reps_count));
  rep.x = x;

  rep.quotient_exact = quotient_apply(space, x) == z;

  // Dual certificate: the functional attaining z_norm(z) = 1, spread over
  // the whole interval of x.
  Rat best(0);
  std::vector<Rat> b;
  for (const auto& f : space.norming_set) {
    Rat v(0);
    for (int i = 0; i < space.dim; ++i) v += f[i] * z[i];
    if (b.empty() || v > best) {
      best = v;
      b = f;
    }
  }
  rep.certificate.a = x.min_coord();
  rep.certificate.b = x.max_coord();
  rep.certificate.coeffs = b;
  rep.ground_lower = rep.certificate.evaluate(space, x);

  rep.norm = norm(cfg, space, x, width, opts).enclosure;

  rep.blocks_ground_ok = true;
  for (const auto& y : rep.blocks) {
    rep.block_l1.push_back(y.l1());
    Rat g = ground_norm(space, y);
    rep.block_ground.push_back(g);
    rep.blocks_ground_ok = rep.blocks_ground_ok && g <= 1;
  }
  return rep;
}

namespace {

struct Terminal {
  NodeAddress address;
  const FunctionalTree* leaf;
  bool has_floor;  // some ancestor weighted node has index >= j0
};

void collect_terminals(const TreePtr& f, const NodeAddress& addr,
                       bool has_floor, int j0, std::vector<Terminal>& out) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground:
      out.push_back({addr, f.get(), has_floor});
      return;
    case FunctionalTree::Kind::Weighted: {
      bool floor2 = has_floor || f->weight_index >= j0;
      for (size_t i = 0; i < f->children.size(); ++i)
        collect_terminals(f->children[i], addr.child(static_cast<int>(i) + 1),
                          floor2, j0, out);
      return;
    }
    default:
      for (size_t i = 0; i < f->terms.size(); ++i)
        collect_terminals(f->terms[i].child,
                          addr.child(static_cast<int>(i) + 1), has_floor, j0,
                          out);
  }
}

// Subtree keeping only the ground leaves whose address lies in `keep`.
TreePtr prune(const TreePtr& f, const NodeAddress& addr,
              const std::set<std::string>& keep) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground:
      return keep.count(addr.str()) ? f : nullptr;
    case FunctionalTree::Kind::Weighted: {
      std::vector<TreePtr> children;
      for (size_t i = 0; i < f->children.size(); ++i) {
        auto c = prune(f->children[i], addr.child(static_cast<int>(i) + 1),
                       keep);
        if (c) children.push_back(c);
      }
      if (children.empty()) return nullptr;
      return FunctionalTree::make_weighted(f->weight_index,
                                           std::move(children));
    }
    default: {
      std::vector<ConvexTerm> terms;
      for (size_t i = 0; i < f->terms.size(); ++i) {
        auto c = prune(f->terms[i].child,
                       addr.child(static_cast<int>(i) + 1), keep);
        if (c) terms.push_back({f->terms[i].index, f->terms[i].lam, c});
      }
      if (terms.empty()) return nullptr;
      return FunctionalTree::make_convex(std::move(terms));
    }
  }
}

// Support range of a single ground functional, scanning at most one
// partition period inward from each end of its interval.
std::optional<std::pair<long, long>> leaf_range(const GroundSpace& space,
                                                const GroundFunctional& g) {
  const long period = static_cast<long>(space.partition.period.size());
  std::optional<long> lo, hi;
  for (long k = g.a; k <= std::min(g.b, g.a + period - 1) && !lo; ++k)
    if (g.coeffs[space.partition.class_of(k) - 1] != 0) lo = k;
  for (long k = g.b; k >= std::max(g.a, g.b - period + 1) && !hi; --k)
    if (g.coeffs[space.partition.class_of(k) - 1] != 0) hi = k;
  if (!lo || !hi) return std::nullopt;
  return std::make_pair(*lo, *hi);
}

}  // namespace

AuditReport node_partition_audit(const WeightConfig& cfg,
                                 const GroundSpace& space, const TreePtr& f,
                                 const FiniteVector& x,
                                 const std::vector<FiniteVector>& blocks,
                                 int j0) {
  if (blocks.empty())
    throw ValidationError("audit: block structure metadata missing");
  if (j0 < 1 || j0 > cfg.levels())
    throw ValidationError("audit: j0 out of range");
  validate_tree(f, cfg, space);

  std::vector<Terminal> terminals;
  collect_terminals(f, NodeAddress{}, false, j0, terminals);

  // depth >= 2 s_{j0}  <=>  m_1^depth >= m_{j0}^2, exactly
  const Int mj0_sq = Int(cfg.m_at(j0)) * Int(cfg.m_at(j0));
  auto deep_enough = [&](size_t depth) {
    return int_pow(Int(cfg.m_at(1)), static_cast<unsigned long>(depth)) >=
           mj0_sq;
  };

  AuditReport rep;
  std::set<std::string> keep1, keep2, keep3;
  std::vector<const FunctionalTree*> shallow_leaves;
  for (const auto& t : terminals) {
    if (deep_enough(t.address.depth())) {
      rep.deep.push_back(t.address);
      keep1.insert(t.address.str());
    } else if (t.has_floor) {
      rep.floored.push_back(t.address);
      keep2.insert(t.address.str());
    } else {
      rep.shallow.push_back(t.address);
      keep3.insert(t.address.str());
      shallow_leaves.push_back(t.leaf);
    }
  }

  auto part = [&](const std::set<std::string>& keep) {
    auto p = prune(f, NodeAddress{}, keep);
    return p ? p : FunctionalTree::zero();
  };
  rep.f_deep = part(keep1);
  rep.f_floored = part(keep2);
  rep.f_shallow = part(keep3);
  rep.v_deep = evaluate(rep.f_deep, cfg, space, x);
  rep.v_floored = evaluate(rep.f_floored, cfg, space, x);
  rep.v_shallow = evaluate(rep.f_shallow, cfg, space, x);
  rep.v_total = evaluate(f, cfg, space, x);
  rep.additive =
      rep.v_deep + rep.v_floored + rep.v_shallow == rep.v_total;

  for (const auto& y : blocks) {
    if (y.empty()) continue;
    long ymin = y.min_coord(), ymax = y.max_coord();
    bool boundary = false;
    for (const auto* leaf : shallow_leaves) {
      auto r = leaf_range(space, leaf->ground);
      if (!r) continue;
      bool intersects = r->first <= ymax && ymin <= r->second;
      bool contained = r->first <= ymin && ymax <= r->second;
      if (intersects && !contained) {
        boundary = true;
        break;
      }
    }
    if (boundary) ++rep.boundary_blocks;
  }
  rep.counting_ok =
      rep.boundary_blocks < 2 * rep.shallow.size() ||
      (rep.boundary_blocks == 0 && rep.shallow.empty());
  return rep;
}

}  // namespace mtn
