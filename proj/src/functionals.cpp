#include "mtn/functionals.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"

namespace mtn {

bool NodeAddress::is_prefix_of(const NodeAddress& o) const {
  if (path.size() > o.path.size()) return false;
  return std::equal(path.begin(), path.end(), o.path.begin());
}

NodeAddress NodeAddress::child(int k) const {
  NodeAddress out = *this;
  out.path.push_back(k);
  return out;
}

std::string NodeAddress::str() const {
  if (path.empty()) return "root";
  std::string s;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(path[i]);
  }
  return s;
}

TreePtr FunctionalTree::make_ground(GroundFunctional g) {
  auto t = std::make_shared<FunctionalTree>();
  t->kind = Kind::Ground;
  t->ground = std::move(g);
  return t;
}

TreePtr FunctionalTree::make_weighted(int index,
                                      std::vector<TreePtr> children) {
  auto t = std::make_shared<FunctionalTree>();
  t->kind = Kind::Weighted;
  t->weight_index = index;
  t->children = std::move(children);
  return t;
}

TreePtr FunctionalTree::make_convex(std::vector<ConvexTerm> terms) {
  auto t = std::make_shared<FunctionalTree>();
  t->kind = Kind::Convex;
  t->terms = std::move(terms);
  return t;
}

TreePtr FunctionalTree::zero() { return make_convex({}); }

bool tree_equal(const TreePtr& a, const TreePtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FunctionalTree::Kind::Ground:
      return a->ground.a == b->ground.a && a->ground.b == b->ground.b &&
             a->ground.coeffs == b->ground.coeffs;
    case FunctionalTree::Kind::Weighted: {
      if (a->weight_index != b->weight_index ||
          a->children.size() != b->children.size())
        return false;
      for (size_t i = 0; i < a->children.size(); ++i)
        if (!tree_equal(a->children[i], b->children[i])) return false;
      return true;
    }
    default: {
      if (a->terms.size() != b->terms.size()) return false;
      for (size_t i = 0; i < a->terms.size(); ++i) {
        if (a->terms[i].index != b->terms[i].index ||
            a->terms[i].lam != b->terms[i].lam ||
            !tree_equal(a->terms[i].child, b->terms[i].child))
          return false;
      }
      return true;
    }
  }
}

TreeError::TreeError(NodeAddress addr, const std::string& what)
    : ValidationError("node " + addr.str() + ": " + what),
      address(std::move(addr)) {}

namespace {

struct Leaf {
  long a, b;
  std::vector<Rat> class_coeffs;  // ground coefficients scaled by the path
};

void collect_leaves(const TreePtr& f, const WeightConfig& cfg,
                    const Rat& factor, std::vector<Leaf>& out) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground: {
      if (f->ground.b < f->ground.a) return;
      Leaf leaf{f->ground.a, f->ground.b, f->ground.coeffs};
      for (auto& c : leaf.class_coeffs) c *= factor;
      out.push_back(std::move(leaf));
      return;
    }
    case FunctionalTree::Kind::Weighted: {
      Rat g = factor / cfg.m_at(f->weight_index);
      for (const auto& c : f->children) collect_leaves(c, cfg, g, out);
      return;
    }
    default:
      for (const auto& t : f->terms)
        collect_leaves(t.child, cfg, factor * t.lam, out);
  }
}

// Constant-coefficient segments of the accumulated leaf cover. Coefficients
// inside one segment depend on the coordinate only through its class.
struct Segment {
  long a, b;
  std::vector<Rat> class_value;
};

std::vector<Segment> coefficient_segments(const std::vector<Leaf>& leaves,
                                          int dim) {
  std::vector<long> events;
  for (const auto& l : leaves) {
    events.push_back(l.a);
    events.push_back(l.b + 1);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  std::vector<Segment> segs;
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    Segment s{events[i], events[i + 1] - 1,
              std::vector<Rat>(dim, Rat(0))};
    bool covered = false;
    for (const auto& l : leaves) {
      if (l.a <= s.a && s.b <= l.b) {
        covered = true;
        for (int c = 0; c < dim; ++c) s.class_value[c] += l.class_coeffs[c];
      }
    }
    if (covered) segs.push_back(std::move(s));
  }
  return segs;
}

}  // namespace

void validate_tree_rec(const TreePtr& f, const WeightConfig& cfg,
                       const GroundSpace& space, const NodeAddress& addr) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground: {
      if (f->ground.a < 1 || f->ground.b < f->ground.a)
        throw TreeError(addr, "ground interval must be nonempty with a >= 1");
      try {
        f->ground.validate(space);
      } catch (const ValidationError& e) {
        throw TreeError(addr, e.what());
      }
      return;
    }
    case FunctionalTree::Kind::Weighted: {
      int j = f->weight_index;
      if (j < 1 || j > cfg.levels())
        throw TreeError(addr, "weight index out of range");
      if (f->children.empty())
        throw TreeError(addr, "weighted node needs at least one child");
      if (static_cast<long>(f->children.size()) > cfg.n_at(j))
        throw TreeError(addr, "weighted node has more than n_j children");
      std::optional<long> prev_max;
      for (size_t i = 0; i < f->children.size(); ++i) {
        const auto& c = f->children[i];
        if (c->kind == FunctionalTree::Kind::Weighted)
          throw TreeError(addr.child(static_cast<int>(i) + 1),
                          "weighted node cannot be the child of a weighted "
                          "node");
        validate_tree_rec(c, cfg, space, addr.child(static_cast<int>(i) + 1));
        auto sb = support_bounds(c, cfg, space);
        if (!sb) continue;  // empty support never violates successiveness
        if (prev_max && *prev_max >= sb->min)
          throw TreeError(addr.child(static_cast<int>(i) + 1),
                          "children are not successive");
        prev_max = sb->max;
      }
      return;
    }
    default: {
      Rat sq(0);
      int prev_index = 0;
      for (size_t i = 0; i < f->terms.size(); ++i) {
        const auto& t = f->terms[i];
        NodeAddress caddr = addr.child(static_cast<int>(i) + 1);
        if (t.index < 1 || t.index > cfg.levels())
          throw TreeError(caddr, "term weight index out of range");
        if (t.index <= prev_index)
          throw TreeError(caddr, "term weight indices must strictly increase");
        prev_index = t.index;
        if (t.lam <= 0)
          throw TreeError(caddr, "term coefficient must be positive");
        sq += t.lam * t.lam;
        if (t.child->kind != FunctionalTree::Kind::Weighted)
          throw TreeError(caddr, "convex term child must be a weighted node");
        if (t.child->weight_index != t.index)
          throw TreeError(caddr,
                          "convex term child weight must match the term "
                          "index");
        validate_tree_rec(t.child, cfg, space, caddr);
      }
      if (sq > 1)
        throw TreeError(addr, "sum of squared coefficients exceeds 1");
      return;
    }
  }
}

void validate_tree(const TreePtr& f, const WeightConfig& cfg,
                   const GroundSpace& space) {
  cfg.validate();
  validate_tree_rec(f, cfg, space, NodeAddress{});
}

Rat evaluate(const TreePtr& f, const WeightConfig& cfg,
             const GroundSpace& space, const FiniteVector& x) {
  switch (f->kind) {
    case FunctionalTree::Kind::Ground:
      return f->ground.evaluate(space, x);
    case FunctionalTree::Kind::Weighted: {
      Rat s(0);
      for (const auto& c : f->children) s += evaluate(c, cfg, space, x);
      return s / cfg.m_at(f->weight_index);
    }
    default: {
      Rat s(0);
      for (const auto& t : f->terms)
        s += t.lam * evaluate(t.child, cfg, space, x);
      return s;
    }
  }
}

Rat sup_norm(const TreePtr& f, const WeightConfig& cfg,
             const GroundSpace& space) {
  std::vector<Leaf> leaves;
  collect_leaves(f, cfg, Rat(1), leaves);
  auto segs = coefficient_segments(leaves, space.dim);
  const long period = static_cast<long>(space.partition.period.size());
  Rat best(0);
  for (const auto& s : segs) {
    long len = s.b - s.a + 1;
    long probe = std::min(len, period);
    for (long k = s.a; k < s.a + probe; ++k) {
      int cls = space.partition.class_of(k);
      best = std::max(best, rat_abs(s.class_value[cls - 1]));
    }
  }
  return best;
}

std::optional<SupportBounds> support_bounds(const TreePtr& f,
                                            const WeightConfig& cfg,
                                            const GroundSpace& space) {
  std::vector<Leaf> leaves;
  collect_leaves(f, cfg, Rat(1), leaves);
  auto segs = coefficient_segments(leaves, space.dim);
  const long period = static_cast<long>(space.partition.period.size());
  std::optional<long> lo, hi;
  for (const auto& s : segs) {
    long len = s.b - s.a + 1;
    long probe = std::min(len, period);
    for (long k = s.a; k < s.a + probe && !lo; ++k)
      if (s.class_value[space.partition.class_of(k) - 1] != 0) {
        // first nonzero class pattern; the earliest matching coordinate in
        // this segment is k itself
        lo = k;
      }
    if (lo) break;
  }
  for (auto it = segs.rbegin(); it != segs.rend() && !hi; ++it) {
    long len = it->b - it->a + 1;
    long probe = std::min(len, period);
    for (long k = it->b; k > it->b - probe && !hi; --k)
      if (it->class_value[space.partition.class_of(k) - 1] != 0) hi = k;
  }
  if (!lo || !hi) return std::nullopt;
  return SupportBounds{*lo, *hi};
}

WeightDescriptor weight_of(const TreePtr& f) {
  WeightDescriptor d;
  if (f->kind == FunctionalTree::Kind::Weighted) {
    d.indices.insert(f->weight_index);
  } else if (f->kind == FunctionalTree::Kind::Convex) {
    for (const auto& t : f->terms) d.indices.insert(t.index);
  } else {
    throw ValidationError("weight_of: ground functionals carry no weight");
  }
  return d;
}

std::pair<TreePtr, TreePtr> split_at(const TreePtr& f, int i0) {
  if (f->kind != FunctionalTree::Kind::Convex)
    throw ValidationError("split_at: root must be a convex node");
  std::vector<ConvexTerm> low, high;
  for (const auto& t : f->terms)
    (t.index <= i0 ? low : high).push_back(t);
  return {FunctionalTree::make_convex(std::move(low)),
          FunctionalTree::make_convex(std::move(high))};
}

TreePtr combine_orthogonal(const TreePtr& psi, const TreePtr& phi,
                           const Rat& lam) {
  if (psi->kind != FunctionalTree::Kind::Convex ||
      phi->kind != FunctionalTree::Kind::Convex)
    throw ValidationError("combine_orthogonal: both roots must be convex");
  if (lam <= 0 || Rat(2) * lam * lam > 1)
    throw ValidationError("combine_orthogonal: need 2*lam^2 <= 1");
  auto wa = weight_of(psi).indices;
  auto wb = weight_of(phi).indices;
  for (int i : wa)
    if (wb.count(i))
      throw ValidationError(
          "combine_orthogonal: weight index " + std::to_string(i) +
          " appears on both sides");
  std::vector<ConvexTerm> merged;
  for (const auto& t : psi->terms) merged.push_back({t.index, t.lam * lam, t.child});
  for (const auto& t : phi->terms) merged.push_back({t.index, t.lam * lam, t.child});
  std::sort(merged.begin(), merged.end(),
            [](const ConvexTerm& a, const ConvexTerm& b) {
              return a.index < b.index;
            });
  return FunctionalTree::make_convex(std::move(merged));
}

FiniteSupportCheck check_tail_splitting(const WeightConfig& cfg,
                                             const GroundSpace& space,
                                             const TreePtr& f,
                                             const FiniteVector& y,
                                             const Rat& eps) {
  FiniteSupportCheck out;
  out.eps = eps;
  if (eps <= 0) {
    out.status = CheckStatus::Rejected;
    out.reason = "eps must be positive";
    return out;
  }
  if (f->kind != FunctionalTree::Kind::Convex) {
    out.status = CheckStatus::Rejected;
    out.reason = "functional must have a convex root to split";
    return out;
  }
  if (cfg.tail == TailRule::None) {
    out.status = CheckStatus::Unsupported;
    out.reason = "tail rule 'none' cannot bound the unmodeled weights";
    return out;
  }
  const Rat supp(static_cast<long>(y.entries.size()));
  int i0 = 1;
  while (true) {
    Rat tail = *cfg.inv_m_from(i0 + 1) * supp;
    if (tail < eps) {
      out.tail_bound = tail;
      break;
    }
    ++i0;
    if (i0 > cfg.levels() + 512) {
      out.status = CheckStatus::Unsupported;
      out.reason = "no splitting level found";
      return out;
    }
  }
  out.i0 = i0;
  out.value = evaluate(split_at(f, i0).second, cfg, space, y);
  out.status = out.value < eps ? CheckStatus::Ok : CheckStatus::Failed;
  return out;
}

SmallWeightCheck check_small_weight_average(
    const WeightConfig& cfg, const GroundSpace& space, const TreePtr& f,
    const std::vector<FiniteVector>& blocks, int j,
    const std::vector<Enclosure>& block_norms) {
  SmallWeightCheck out;
  auto reject = [&](const std::string& why) {
    out.status = CheckStatus::Rejected;
    out.reason = why;
    return out;
  };
  if (f->kind == FunctionalTree::Kind::Ground)
    return reject("functional must be weighted");
  WeightDescriptor w = weight_of(f);
  if (!w.weighted()) return reject("functional must have a single weight");
  int j0 = w.sole_index();
  if (j < 1 || j > cfg.levels()) return reject("j out of range");
  if (j <= j0) return reject("need j > j0");
  if (static_cast<long>(blocks.size()) != cfg.n_at(j))
    return reject("need exactly n_j blocks");
  if (block_norms.size() != blocks.size())
    return reject("one norm enclosure per block required");
  std::optional<long> prev;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty()) return reject("blocks must be nonzero");
    if (prev && *prev >= blocks[i].min_coord())
      return reject("blocks must be successive");
    prev = blocks[i].max_coord();
    if (!block_norms[i].contains(Rat(1)))
      return reject("block " + std::to_string(i + 1) +
                    " is not certified normalized");
  }
  FiniteVector avg;
  for (const auto& b : blocks) avg = avg.plus(b);
  avg = avg.scaled(Rat(1, cfg.n_at(j)));
  out.value = evaluate(f, cfg, space, avg);
  out.bound = Rat(3, cfg.m_at(j0));
  out.bound.canonicalize();
  out.margin = out.bound - out.value;
  out.status = out.value < out.bound ? CheckStatus::Ok : CheckStatus::Failed;
  return out;
}

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  long pick(long lo, long hi) {  // inclusive; plain modulo keeps this
    return lo + static_cast<long>(gen() % static_cast<unsigned long long>(
                                              hi - lo + 1));
  }
};

class TreeGen {
 public:
  TreeGen(const WeightConfig& cfg, const GroundSpace& space, Rng& rng)
      : cfg_(cfg), space_(space), rng_(rng) {}

  TreePtr ground() {
    long gap = rng_.pick(0, 1);
    long len = rng_.pick(1, 2);
    GroundFunctional g;
    g.a = cursor_ + 1 + gap;
    g.b = g.a + len - 1;
    g.coeffs = space_.norming_set[static_cast<size_t>(
        rng_.pick(0, static_cast<long>(space_.norming_set.size()) - 1))];
    cursor_ = g.b;
    return FunctionalTree::make_ground(std::move(g));
  }

  std::vector<ConvexTerm> pick_terms(long lo_index, long hi_index) {
    long span = hi_index - lo_index + 1;
    long k = rng_.pick(1, std::min<long>(span, 3));
    std::set<int> idx;
    while (static_cast<long>(idx.size()) < k)
      idx.insert(static_cast<int>(rng_.pick(lo_index, hi_index)));
    // coefficients a_i/(2k) with sum of squares certified <= 1
    std::vector<long> nums(idx.size());
    for (int tries = 0; tries < 20; ++tries) {
      long sq = 0;
      for (auto& a : nums) {
        a = rng_.pick(1, 2 * k);
        sq += a * a;
      }
      if (sq <= 4 * k * k) break;
      if (tries == 19)
        for (auto& a : nums) a = 1;
    }
    std::vector<ConvexTerm> terms;
    size_t t = 0;
    for (int i : idx) {
      Rat lam(nums[t++], 2 * k);
      lam.canonicalize();
      terms.push_back({i, lam, nullptr});
    }
    return terms;
  }

  TreePtr weighted(int j, int budget) {
    long d = rng_.pick(1, std::min<long>(cfg_.n_at(j), 3));
    std::vector<TreePtr> children;
    for (long i = 0; i < d; ++i) {
      if (budget <= 0 || rng_.pick(0, 1) == 0)
        children.push_back(ground());
      else
        children.push_back(convex(budget - 1));
    }
    return FunctionalTree::make_weighted(j, std::move(children));
  }

  TreePtr convex(int budget) {
    auto terms = pick_terms(1, cfg_.levels());
    for (auto& t : terms) t.child = weighted(t.index, budget);
    return FunctionalTree::make_convex(std::move(terms));
  }

  // Every ground leaf at depth >= min_depth; strict alternation.
  TreePtr deep_convex(int depth, int min_depth) {
    auto terms = pick_terms(1, cfg_.levels());
    for (auto& t : terms) t.child = deep_weighted(t.index, depth + 1, min_depth);
    return FunctionalTree::make_convex(std::move(terms));
  }

  TreePtr deep_weighted(int j, int depth, int min_depth) {
    long d = rng_.pick(1, std::min<long>(cfg_.n_at(j), 3));
    std::vector<TreePtr> children;
    for (long i = 0; i < d; ++i) {
      bool deep_enough = depth + 1 >= min_depth;
      bool extend = !deep_enough || (depth + 1 < min_depth + 2 &&
                                     rng_.pick(0, 3) == 0);
      if (extend)
        children.push_back(deep_convex(depth + 1, min_depth));
      else
        children.push_back(ground());
    }
    return FunctionalTree::make_weighted(j, std::move(children));
  }

  // Every root-to-leaf path passes a weighted node of index >= j0.
  TreePtr floor_convex(int j0, int depth) {
    bool force = depth >= 3;
    auto terms =
        force ? pick_terms(j0, cfg_.levels()) : pick_terms(1, cfg_.levels());
    for (auto& t : terms) {
      if (t.index >= j0) {
        t.child = weighted(t.index, 1);
      } else {
        long d = rng_.pick(1, std::min<long>(cfg_.n_at(t.index), 2));
        std::vector<TreePtr> children;
        for (long i = 0; i < d; ++i)
          children.push_back(floor_convex(j0, depth + 1));
        t.child = FunctionalTree::make_weighted(t.index, std::move(children));
      }
    }
    return FunctionalTree::make_convex(std::move(terms));
  }

 private:
  const WeightConfig& cfg_;
  const GroundSpace& space_;
  Rng& rng_;
  long cursor_ = 0;
};

}  // namespace

TreePtr random_tree(const WeightConfig& cfg, const GroundSpace& space,
                    const TreeShape& shape, unsigned long long seed) {
  cfg.validate();
  Rng rng(seed);
  TreeGen gen(cfg, space, rng);
  switch (shape.kind) {
    case TreeShape::Kind::Free:
      return gen.convex(3);
    case TreeShape::Kind::MinTerminalDepth: {
      if (shape.param < 0 || shape.param > 12)
        throw ValidationError("random_tree: unsatisfiable depth shape");
      return gen.deep_convex(0, shape.param);
    }
    default: {
      if (shape.param < 1 || shape.param > cfg.levels())
        throw ValidationError(
            "random_tree: weight floor outside the configured levels");
      return gen.floor_convex(shape.param, 0);
    }
  }
}

FiniteVector random_vector(unsigned long long seed, int max_support,
                           long max_coord, long max_num, long max_den) {
  Rng rng(seed);
  FiniteVector v;
  long count = rng.pick(1, max_support);
  for (long i = 0; i < count; ++i) {
    long coord = rng.pick(1, max_coord);
    long num = rng.pick(1, max_num) * (rng.pick(0, 1) ? 1 : -1);
    long den = rng.pick(1, max_den);
    Rat q(num, den);
    q.canonicalize();
    v.set(coord, q);
  }
  return v;
}

namespace {

using nlohmann::json;

json tree_json_rec(const TreePtr& f) {
  json out;
  switch (f->kind) {
    case FunctionalTree::Kind::Ground: {
      out["kind"] = "ground";
      out["interval"] = {f->ground.a, f->ground.b};
      json cs = json::array();
      for (const auto& c : f->ground.coeffs) cs.push_back(rat_str(c));
      out["coeffs"] = cs;
      return out;
    }
    case FunctionalTree::Kind::Weighted: {
      out["kind"] = "weighted";
      out["index"] = f->weight_index;
      json cs = json::array();
      for (const auto& c : f->children) cs.push_back(tree_json_rec(c));
      out["children"] = cs;
      return out;
    }
    default: {
      out["kind"] = "convex";
      json ts = json::array();
      for (const auto& t : f->terms) {
        json jt;
        jt["index"] = t.index;
        jt["lambda"] = rat_str(t.lam);
        jt["child"] = tree_json_rec(t.child);
        ts.push_back(jt);
      }
      out["terms"] = ts;
      return out;
    }
  }
}

TreePtr tree_parse_rec(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ground") {
    GroundFunctional g;
    g.a = j.at("interval").at(0).get<long>();
    g.b = j.at("interval").at(1).get<long>();
    for (const auto& c : j.at("coeffs")) {
      auto q = parse_rational(c.get<std::string>());
      if (!q) throw ValidationError("tree json: bad rational");
      g.coeffs.push_back(*q);
    }
    return FunctionalTree::make_ground(std::move(g));
  }
  if (kind == "weighted") {
    std::vector<TreePtr> children;
    for (const auto& c : j.at("children")) children.push_back(tree_parse_rec(c));
    return FunctionalTree::make_weighted(j.at("index").get<int>(),
                                         std::move(children));
  }
  if (kind == "convex") {
    std::vector<ConvexTerm> terms;
    for (const auto& t : j.at("terms")) {
      auto lam = parse_rational(t.at("lambda").get<std::string>());
      if (!lam) throw ValidationError("tree json: bad rational");
      terms.push_back(
          {t.at("index").get<int>(), *lam, tree_parse_rec(t.at("child"))});
    }
    return FunctionalTree::make_convex(std::move(terms));
  }
  throw ValidationError("tree json: unknown node kind '" + kind + "'");
}

}  // namespace

std::string tree_to_json(const TreePtr& f) { return tree_json_rec(f).dump(); }

TreePtr tree_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("tree json: ") + e.what());
  }
  return tree_parse_rec(j);
}

}  // namespace mtn
