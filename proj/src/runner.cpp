#include "mtn/runner.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"

namespace mtn {

namespace {

using nlohmann::json;

json enclosure_json(const Enclosure& e) {
  json out;
  out["lo"] = rat_str(e.lo);
  out["hi"] = rat_str(e.hi);
  out["lo_dec"] = rat_decimal(e.lo);
  out["hi_dec"] = rat_decimal(e.hi);
  out["width"] = rat_str(e.width());
  return out;
}

struct SuiteRng {
  std::mt19937_64 gen;
  explicit SuiteRng(unsigned long long seed) : gen(seed) {}
  long pick(long lo, long hi) {
    return lo + static_cast<long>(gen() % static_cast<unsigned long long>(
                                              hi - lo + 1));
  }
};

// Random space with the bimonotonicity certificate holding by construction:
// signed units plus one random functional together with all of its interval
// restrictions.
GroundSpace random_space(SuiteRng& rng, int dim) {
  GroundSpace sp;
  sp.dim = dim;
  sp.partition = Partition::round_robin(dim);
  std::vector<std::vector<Rat>> fs;
  for (int i = 0; i < dim; ++i) {
    std::vector<Rat> e(dim, Rat(0));
    e[i] = 1;
    fs.push_back(e);
  }
  std::vector<Rat> v(dim);
  for (int i = 0; i < dim; ++i) {
    long den = rng.pick(1, 3);
    v[i] = Rat(rng.pick(-den, den), den);
    v[i].canonicalize();
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      std::vector<Rat> r(dim, Rat(0));
      for (int i = a; i <= b; ++i) r[i] = v[i];
      fs.push_back(r);
    }
  }
  for (const auto& f : fs) {
    std::vector<Rat> neg(f.size());
    for (size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
    sp.norming_set.push_back(f);
    sp.norming_set.push_back(neg);
  }
  std::sort(sp.norming_set.begin(), sp.norming_set.end());
  sp.norming_set.erase(
      std::unique(sp.norming_set.begin(), sp.norming_set.end()),
      sp.norming_set.end());
  return sp;
}

std::string vec_str(const FiniteVector& v) { return v.str(); }

}  // namespace

std::string SuiteReport::to_json(const SpaceDefinition& def) const {
  json out;
  out["space_hash"] = def.hash_hex;
  out["suite"] = suite;
  out["outcome"] = outcome == SuiteOutcome::Pass
                       ? "pass"
                       : (outcome == SuiteOutcome::Fail ? "fail" : "skipped");
  out["requested"] = requested;
  out["executed"] = executed;
  out["failures"] = failures;
  if (!skip_reason.empty()) out["skip_reason"] = skip_reason;
  if (!failure_details.empty()) out["failure_details"] = failure_details;
  return out.dump(2);
}

SuiteReport run_check_suite(const SpaceDefinition& def,
                            const std::string& suite, int count,
                            unsigned long long seed) {
  SuiteReport rep;
  rep.suite = suite;
  rep.requested = count;
  const WeightConfig& cfg = def.weights;
  const GroundSpace& space = def.ground;

  auto fail = [&](const std::string& detail) {
    ++rep.failures;
    rep.outcome = SuiteOutcome::Fail;
    if (rep.failure_details.size() < 5) rep.failure_details.push_back(detail);
  };
  auto skip = [&](const std::string& why) {
    rep.outcome = SuiteOutcome::Skipped;
    rep.skip_reason = why;
    return rep;
  };

  Rat inv_m = cfg.inv_m_prefix();
  if (auto t = cfg.inv_m_tail()) inv_m += *t;

  if (suite == "lemma33") {
    if (cfg.tail != TailRule::Doubling)
      return skip("the splitting level needs the doubling tail rule");
    for (int i = 0; i < count; ++i, ++rep.executed) {
      TreePtr f = random_tree(cfg, space, TreeShape::free(), seed + i);
      FiniteVector y = random_vector(seed * 31 + i, 6, 12, 1, 2);
      Rat eps(1, 1 << (i % 3 + 1));
      auto res = check_tail_splitting(cfg, space, f, y, eps);
      if (!res.ok())
        fail("tree=" + tree_to_json(f) + " y=" + vec_str(y) +
             " eps=" + rat_str(eps) + " value=" + rat_str(res.value));
    }
  } else if (suite == "lemma34") {
    if (cfg.levels() < 2) return skip("needs at least two weight levels");
    SuiteRng rng(seed);
    for (int i = 0; i < count; ++i, ++rep.executed) {
      int j0 = static_cast<int>(rng.pick(1, cfg.levels() - 1));
      int j = static_cast<int>(rng.pick(j0 + 1, cfg.levels()));
      TreePtr inner = random_tree(cfg, space, TreeShape::free(), seed + i);
      auto sb = support_bounds(inner, cfg, space);
      TreePtr f = FunctionalTree::make_convex(
          {{j0, Rat(1), FunctionalTree::make_weighted(j0, {inner})}});
      long base = sb ? sb->max : 0;
      std::vector<FiniteVector> blocks;
      std::vector<Enclosure> norms;
      for (long t = 0; t < cfg.n_at(j); ++t) {
        blocks.push_back(FiniteVector::unit(base + 1 + t));
        norms.push_back(Enclosure(Rat(1)));  // units are exactly normalized
      }
      auto res = check_small_weight_average(cfg, space, f, blocks, j, norms);
      if (!res.ok())
        fail("tree=" + tree_to_json(f) + " j0=" + std::to_string(j0) +
             " j=" + std::to_string(j) + " value=" + rat_str(res.value) +
             " reason=" + res.reason);
    }
  } else if (suite == "lemma41") {
    if (inv_m >= Rat(1, 10))
      return skip("scaling sum " + rat_str(inv_m) +
                  " >= 1/10; the sup-norm bound needs the scaling condition");
    for (int i = 0; i < count; ++i, ++rep.executed) {
      int n = i % 2 + 1;
      TreePtr f =
          random_tree(cfg, space, TreeShape::min_terminal_depth(2 * n),
                      seed + i);
      Rat bound = rat_pow_int(Rat(1, 10), static_cast<unsigned long>(n));
      Rat s = sup_norm(f, cfg, space);
      if (s > bound)
        fail("n=" + std::to_string(n) + " sup=" + rat_str(s) +
             " tree=" + tree_to_json(f));
    }
  } else if (suite == "lemma42") {
    if (cfg.levels() < 2) return skip("needs at least two weight levels");
    if (inv_m >= Rat(1, 10))
      return skip("scaling sum " + rat_str(inv_m) +
                  " >= 1/10; the sup-norm bound needs the scaling condition");
    for (int i = 0; i < count; ++i, ++rep.executed) {
      int j0 = 2 + i % std::min(cfg.levels() - 1, 2);
      TreePtr f =
          random_tree(cfg, space, TreeShape::weight_floor(j0), seed + i);
      Rat bound = cfg.inv_m_prefix(j0);
      if (auto t = cfg.inv_m_tail()) bound += *t;
      bound *= 2;
      Rat s = sup_norm(f, cfg, space);
      if (s > bound)
        fail("j0=" + std::to_string(j0) + " sup=" + rat_str(s) +
             " bound=" + rat_str(bound) + " tree=" + tree_to_json(f));
    }
  } else if (suite == "lift") {
    SuiteRng rng(seed);
    for (int i = 0; i < count; ++i, ++rep.executed) {
      int dim = static_cast<int>(rng.pick(2, 3));
      GroundSpace sp = random_space(rng, dim);
      try {
        sp.validate();
      } catch (const ValidationError& e) {
        fail(std::string("generated space invalid: ") + e.what());
        continue;
      }
      std::vector<Rat> z0(dim, Rat(0));
      bool nonzero = false;
      for (int c = 0; c < dim; ++c) {
        long den = rng.pick(1, 2);
        z0[c] = Rat(rng.pick(-2, 2), den);
        z0[c].canonicalize();
        nonzero = nonzero || z0[c] != 0;
      }
      if (!nonzero) z0[0] = 1;
      Rat nu = z_norm(sp, z0);
      std::vector<Rat> z(dim);
      for (int c = 0; c < dim; ++c) z[c] = z0[c] / nu;
      std::vector<long> reps(dim);
      long t = rng.pick(1, 3);
      for (int c = 0; c < dim; ++c) {
        reps[c] = sp.partition.coord_of_class(c + 1, t);
        t += rng.pick(0, 1);
      }
      FiniteVector y = lift_isometric(sp, z, reps);
      bool iso = ground_norm(sp, y) == z_norm(sp, z);
      bool quot = quotient_apply(sp, y) == z;
      if (!iso || !quot)
        fail("dim=" + std::to_string(dim) + " z0=" + rat_str(z0[0]) +
             (iso ? "" : " isometry broken") +
             (quot ? "" : " quotient broken"));
    }
  } else if (suite == "jtree") {
    SuiteRng rng(seed);
    for (int i = 0; i < count; ++i, ++rep.executed) {
      TreeVector tv;
      long nodes = rng.pick(1, 10);
      for (long v = 0; v < nodes; ++v) {
        long den = rng.pick(1, 2);
        Rat val(rng.pick(-3, 3), den);
        val.canonicalize();
        tv.nodes.push_back({val, {}});
        if (v > 0)
          tv.nodes[static_cast<size_t>(rng.pick(0, v - 1))]
              .children.push_back(static_cast<int>(v));
      }
      Rat dp = jtree_norm(tv).squared;
      Rat bf = jtree_norm_bruteforce(tv);
      if (dp != bf)
        fail("tree=" + tv.to_json() + " dp=" + rat_str(dp) +
             " brute=" + rat_str(bf));
    }
  } else {
    throw ValidationError("unknown suite '" + suite + "'");
  }
  return rep;
}

namespace {

json quotient_json(const QuotientReport& r) {
  json out;
  out["kind"] = "quotient";
  json zz = json::array();
  for (const auto& q : r.z) zz.push_back(rat_str(q));
  out["z"] = zz;
  out["j0"] = r.j0;
  out["conditions_ok"] = r.conditions_ok;
  out["conditions"] = {
      {"tail_sum", verdict_str(r.conditions.tail_sum.verdict)},
      {"growth", verdict_str(r.conditions.growth.verdict)},
      {"depth", verdict_str(r.conditions.depth.verdict)}};
  out["x"] = r.x.str();
  out["quotient_exact"] = r.quotient_exact;
  out["ground_lower"] = rat_str(r.ground_lower);
  out["norm"] = enclosure_json(r.norm);
  json bl = json::array();
  for (size_t t = 0; t < r.blocks.size(); ++t) {
    json b;
    b["l1"] = rat_str(r.block_l1[t]);
    b["ground"] = rat_str(r.block_ground[t]);
    bl.push_back(b);
  }
  out["blocks"] = bl;
  out["blocks_ground_ok"] = r.blocks_ground_ok;
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const SpaceDefinition& def,
                                const std::string& name) {
  const ExperimentManifest* man = nullptr;
  for (const auto& m : def.experiments)
    if (m.name == name) man = &m;
  if (!man)
    throw ValidationError("no experiment named '" + name +
                          "' in the space definition");

  EngineOptions opts;
  opts.extended = man->extended;

  ExperimentOutput out;
  out.name = name;
  json j;
  j["space_hash"] = def.hash_hex;
  j["experiment"] = name;

  if (man->kind == "quotient") {
    if (man->z.empty())
      throw ValidationError("quotient experiment needs z");
    QuotientReport r = quotient_experiment(def.weights, def.ground, man->z,
                                           man->j0, man->width, opts);
    j["report"] = quotient_json(r);
    out.ok = r.quotient_exact && r.ground_lower >= 1;
  } else if (man->kind == "blocks") {
    if (man->count < 1)
      throw ValidationError("blocks experiment needs count >= 1");
    std::vector<FiniteVector> blocks;
    for (long i = 1; i <= man->count; ++i)
      blocks.push_back(FiniteVector::unit(i));
    BlockGrowthReport r = block_growth_table(def.weights, def.ground, blocks,
                                             man->p_list, man->width, opts);
    json rows = json::array();
    std::string csv = "level,count,lo,hi,reference,witness";
    for (const Rat& p : man->p_list) csv += ",n^(1/" + rat_str(p) + ")_hi";
    csv += "\n";
    for (const auto& row : r.rows) {
      json rj;
      rj["level"] = row.level;
      rj["count"] = row.count;
      rj["norm"] = enclosure_json(row.norm);
      rj["reference"] = rat_str(row.reference);
      rj["witness_value"] = rat_str(row.witness_value);
      rj["lower_bound_ok"] = row.lower_bound_ok;
      json ps = json::array();
      for (const auto& [p, e] : row.powers)
        ps.push_back({{"p", rat_str(p)}, {"value", enclosure_json(e)}});
      rj["powers"] = ps;
      rows.push_back(rj);
      csv += std::to_string(row.level) + "," + std::to_string(row.count) +
             "," + rat_str(row.norm.lo) + "," + rat_str(row.norm.hi) + "," +
             rat_str(row.reference) + "," + rat_str(row.witness_value);
      for (const auto& [p, e] : row.powers) csv += "," + rat_str(e.hi);
      csv += "\n";
    }
    j["report"] = {{"kind", "blocks"},
                   {"blocks_certified", r.blocks_certified},
                   {"rows", rows}};
    out.files.emplace_back(name + ".csv", csv);
    out.ok = true;
    for (const auto& row : r.rows) out.ok = out.ok && row.lower_bound_ok;
  } else if (man->kind == "cesaro") {
    if (man->counts.empty())
      throw ValidationError("cesaro experiment needs counts");
    long maxc = *std::max_element(man->counts.begin(), man->counts.end());
    std::vector<FiniteVector> seq;
    for (long i = 1; i <= maxc; ++i) {
      Rat v = man->signs == "alternating" && (i % 2 == 1) ? Rat(-1) : Rat(1);
      seq.push_back(FiniteVector::unit(i, v));
    }
    auto prof = cesaro_profile(def.weights, def.ground, seq, man->counts,
                               man->width, opts);
    json rows = json::array();
    std::string csv = "count,lo,hi\n";
    for (size_t i = 0; i < prof.size(); ++i) {
      rows.push_back({{"count", man->counts[i]},
                      {"norm", enclosure_json(prof[i])}});
      csv += std::to_string(man->counts[i]) + "," + rat_str(prof[i].lo) +
             "," + rat_str(prof[i].hi) + "\n";
    }
    j["report"] = {{"kind", "cesaro"}, {"signs", man->signs}, {"rows", rows}};
    out.files.emplace_back(name + ".csv", csv);
    out.ok = true;
  } else if (man->kind == "ell1") {
    if (man->family_size < 1)
      throw ValidationError("ell1 experiment needs family_size >= 1");
    std::vector<FiniteVector> family;
    for (long i = 1; i <= man->family_size; ++i)
      family.push_back(FiniteVector::unit(i));
    Ell1Report r = ell1_constant(def.weights, def.ground, family, {},
                                 man->width, opts);
    json pat = json::array();
    for (const auto& q : r.arg_pattern) pat.push_back(rat_str(q));
    j["report"] = {{"kind", "ell1"},
                   {"constant", enclosure_json(r.constant)},
                   {"patterns_tested", r.patterns_tested},
                   {"arg_pattern", pat}};
    out.ok = true;
  } else {
    throw ValidationError("unknown experiment kind '" + man->kind + "'");
  }

  out.json = j.dump(2);
  out.files.emplace_back(name + ".json", out.json);
  return out;
}

std::string norm_report_json(const SpaceDefinition& def, const FiniteVector& x,
                             const Rat& width, bool extended) {
  EngineOptions opts;
  opts.extended = extended;
  NormResult r = norm(def.weights, def.ground, x, width, opts);
  json j;
  j["space_hash"] = def.hash_hex;
  j["mode"] = extended ? "extended" : "truncated";
  j["vector"] = x.str();
  j["lo"] = rat_str(r.enclosure.lo);
  j["hi"] = rat_str(r.enclosure.hi);
  j["lo_dec"] = rat_decimal(r.enclosure.lo);
  j["hi_dec"] = rat_decimal(r.enclosure.hi);
  j["width"] = rat_str(r.enclosure.width());
  j["sweeps"] = r.table.sweeps;
  j["width_reached"] = r.table.width_reached;
  j["witness_value"] = rat_str(r.witness_value);
  j["witness"] = json::parse(tree_to_json(r.witness));
  return j.dump(2);
}

std::string jtree_report_json(const TreeVector& tv) {
  JTreeResult r = jtree_norm(tv);
  json j;
  j["nodes"] = tv.size();
  j["squared"] = rat_str(r.squared);
  j["lo"] = rat_str(r.norm.lo);
  j["hi"] = rat_str(r.norm.hi);
  j["lo_dec"] = rat_decimal(r.norm.lo);
  j["hi_dec"] = rat_decimal(r.norm.hi);
  return j.dump(2);
}

}  // namespace mtn
