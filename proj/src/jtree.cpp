#include "mtn/jtree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "mtn/config.hpp"

namespace mtn {

namespace {

using nlohmann::json;

size_t skip_ws(const std::string& s, size_t p) {
  while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
  return p;
}

int parse_node(const std::string& s, size_t& p, TreeVector& tv) {
  p = skip_ws(s, p);
  if (p >= s.size() || s[p] != '(')
    throw ValidationError("tree text: expected '('");
  ++p;
  p = skip_ws(s, p);
  size_t start = p;
  while (p < s.size() && s[p] != '(' && s[p] != ')' &&
         !std::isspace(static_cast<unsigned char>(s[p])))
    ++p;
  auto val = parse_rational(s.substr(start, p - start));
  if (!val)
    throw ValidationError("tree text: bad rational '" +
                          s.substr(start, p - start) + "'");
  int idx = static_cast<int>(tv.nodes.size());
  tv.nodes.push_back({*val, {}});
  p = skip_ws(s, p);
  while (p < s.size() && s[p] == '(') {
    int child = parse_node(s, p, tv);
    tv.nodes[idx].children.push_back(child);
    p = skip_ws(s, p);
  }
  if (p >= s.size() || s[p] != ')')
    throw ValidationError("tree text: expected ')'");
  ++p;
  return idx;
}

int parse_json_node(const json& j, TreeVector& tv) {
  auto val = parse_rational(j.at("value").get<std::string>());
  if (!val) throw ValidationError("tree json: bad rational value");
  int idx = static_cast<int>(tv.nodes.size());
  tv.nodes.push_back({*val, {}});
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) {
      int child = parse_json_node(c, tv);  // may grow tv.nodes
      tv.nodes[idx].children.push_back(child);
    }
  }
  return idx;
}

}  // namespace

TreeVector TreeVector::parse_text(const std::string& text) {
  TreeVector tv;
  size_t p = 0;
  tv.root = parse_node(text, p, tv);
  p = skip_ws(text, p);
  if (p != text.size())
    throw ValidationError("tree text: trailing characters");
  return tv;
}

TreeVector TreeVector::parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("tree json: ") + e.what());
  }
  TreeVector tv;
  tv.root = parse_json_node(j, tv);
  return tv;
}

TreeVector TreeVector::parse(const std::string& text) {
  size_t p = skip_ws(text, 0);
  if (p < text.size() && text[p] == '{') return parse_json(text);
  return parse_text(text);
}

namespace {

json node_to_json(const TreeVector& tv, int idx) {
  json out;
  out["value"] = rat_str(tv.nodes[idx].value);
  json cs = json::array();
  for (int c : tv.nodes[idx].children) cs.push_back(node_to_json(tv, c));
  out["children"] = cs;
  return out;
}

}  // namespace

std::string TreeVector::to_json() const {
  if (nodes.empty()) return "{}";
  return node_to_json(*this, root).dump();
}

namespace {

struct Dp {
  const TreeVector& tv;
  std::vector<Rat> best_chain;  // max |value| sum over chains starting here
  std::vector<Rat> best_sq;     // max squared family sum within the subtree

  explicit Dp(const TreeVector& t) : tv(t) {
    best_chain.assign(tv.nodes.size(), Rat(0));
    best_sq.assign(tv.nodes.size(), Rat(0));
    run(tv.root);
  }

  void run(int v) {
    Rat child_chain(0);
    Rat child_sq_sum(0);
    for (int c : tv.nodes[v].children) {
      run(c);
      child_chain = std::max(child_chain, best_chain[c]);
      child_sq_sum += best_sq[c];
    }
    best_chain[v] = rat_abs(tv.nodes[v].value) + child_chain;
    // Either no segment touches v (children are mutually incomparable) or
    // one chain through v excludes everything else in this subtree.
    best_sq[v] = std::max(child_sq_sum, Rat(best_chain[v] * best_chain[v]));
  }
};

}  // namespace

JTreeResult jtree_norm(const TreeVector& tv, int sqrt_bits) {
  if (tv.nodes.empty()) return {Enclosure(Rat(0)), Rat(0)};
  Dp dp(tv);
  JTreeResult out;
  out.squared = dp.best_sq[tv.root];
  out.norm = sqrt_enclosure(Enclosure(out.squared), sqrt_bits);
  return out;
}

Rat jtree_norm_bruteforce(const TreeVector& tv, size_t node_cap) {
  if (tv.nodes.empty()) return Rat(0);
  if (tv.size() > node_cap)
    throw ValidationError("jtree brute force: tree exceeds the node cap");
  const size_t n = tv.size();

  // ancestor[a][b]: a is an ancestor-or-equal of b. Both parsers create
  // nodes parent-before-child, so one pass in index order closes the
  // relation.
  std::vector<std::vector<bool>> anc(n, std::vector<bool>(n, false));
  for (size_t v = 0; v < n; ++v) anc[v][v] = true;
  for (size_t v = 0; v < n; ++v)
    for (int c : tv.nodes[v].children)
      for (size_t a = 0; a < n; ++a)
        if (anc[a][v]) anc[a][static_cast<size_t>(c)] = true;

  // all segments with their node sets and value sums
  struct Seg {
    std::vector<size_t> nodes;
    Rat sum;
  };
  std::vector<Seg> segs;
  for (size_t top = 0; top < n; ++top) {
    for (size_t bot = 0; bot < n; ++bot) {
      if (!anc[top][bot]) continue;
      Seg s;
      s.sum = 0;
      for (size_t mid = 0; mid < n; ++mid)
        if (anc[top][mid] && anc[mid][bot]) {
          s.nodes.push_back(mid);
          s.sum += rat_abs(tv.nodes[mid].value);
        }
      segs.push_back(std::move(s));
    }
  }

  auto incomparable = [&](const Seg& a, const Seg& b) {
    for (size_t x : a.nodes)
      for (size_t y : b.nodes)
        if (anc[x][y] || anc[y][x]) return false;
    return true;
  };

  Rat best(0);
  std::vector<size_t> chosen;
  std::function<void(size_t, Rat)> rec = [&](size_t from, Rat acc) {
    best = std::max(best, acc);
    for (size_t s = from; s < segs.size(); ++s) {
      bool ok = true;
      for (size_t c : chosen) ok = ok && incomparable(segs[s], segs[c]);
      if (!ok) continue;
      chosen.push_back(s);
      rec(s + 1, acc + segs[s].sum * segs[s].sum);
      chosen.pop_back();
    }
  };
  rec(0, Rat(0));
  return best;
}

}  // namespace mtn
