#include "mtn/spacefile.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace mtn {

namespace {

struct Value {
  enum class Kind { Integer, Text, Array } kind;
  long integer = 0;
  std::string text;
  std::vector<Value> array;
  int line = 0;
};

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  int line;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
};

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::Array;
  v.line = c.line;
  ++c.pos;  // '['
  c.skip_ws();
  if (c.pos < c.s.size() && c.s[c.pos] == ']') {
    ++c.pos;
    return v;
  }
  while (true) {
    v.array.push_back(parse_value(c));
    c.skip_ws();
    if (c.pos < c.s.size() && c.s[c.pos] == ',') {
      ++c.pos;
      continue;
    }
    if (c.pos < c.s.size() && c.s[c.pos] == ']') {
      ++c.pos;
      return v;
    }
    throw ParseError(c.line, "expected ',' or ']' in array");
  }
}

Value parse_value(Cursor& c) {
  c.skip_ws();
  if (c.pos >= c.s.size()) throw ParseError(c.line, "missing value");
  char ch = c.s[c.pos];
  if (ch == '[') return parse_array(c);
  Value v;
  v.line = c.line;
  if (ch == '"') {
    ++c.pos;
    size_t start = c.pos;
    while (c.pos < c.s.size() && c.s[c.pos] != '"') ++c.pos;
    if (c.pos >= c.s.size()) throw ParseError(c.line, "unterminated string");
    v.kind = Value::Kind::Text;
    v.text = c.s.substr(start, c.pos - start);
    ++c.pos;
    return v;
  }
  size_t start = c.pos;
  while (c.pos < c.s.size() && (std::isalnum(static_cast<unsigned char>(c.s[c.pos])) ||
                                c.s[c.pos] == '-' || c.s[c.pos] == '_' ||
                                c.s[c.pos] == '/'))
    ++c.pos;
  std::string tok = c.s.substr(start, c.pos - start);
  if (tok.empty()) throw ParseError(c.line, "bad value");
  try {
    size_t used = 0;
    long n = std::stol(tok, &used);
    if (used == tok.size()) {
      v.kind = Value::Kind::Integer;
      v.integer = n;
      return v;
    }
  } catch (...) {
  }
  throw ParseError(c.line, "bad value '" + tok + "' (strings need quotes)");
}

long need_int(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Integer)
    throw ParseError(v.line, key + " must be an integer");
  return v.integer;
}

std::string need_text(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Text)
    throw ParseError(v.line, key + " must be a quoted string");
  return v.text;
}

Rat need_rational(const Value& v, const std::string& key) {
  if (v.kind == Value::Kind::Integer) return Rat(v.integer);
  if (v.kind == Value::Kind::Text) {
    auto q = parse_rational(v.text);
    if (q) return *q;
  }
  throw ParseError(v.line, key + " must be a rational like \"p/q\"");
}

std::vector<long> need_int_array(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Array)
    throw ParseError(v.line, key + " must be an array");
  std::vector<long> out;
  for (const auto& e : v.array) out.push_back(need_int(e, key + " entry"));
  return out;
}

std::vector<Rat> need_rational_array(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Array)
    throw ParseError(v.line, key + " must be an array");
  std::vector<Rat> out;
  for (const auto& e : v.array)
    out.push_back(need_rational(e, key + " entry"));
  return out;
}

using Section = std::map<std::string, Value>;

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

SpaceDefinition parse_space_definition(const std::string& text) {
  std::map<std::string, Section> sections;
  std::vector<std::string> section_order;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(lineno, "malformed section header");
      current = line.substr(1, line.size() - 2);
      if (sections.count(current))
        throw ParseError(lineno, "duplicate section [" + current + "]");
      sections[current] = {};
      section_order.push_back(current);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected 'key = value'");
    if (current.empty())
      throw ParseError(lineno, "key outside of any section");
    std::string key = line.substr(0, eq);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
      key.pop_back();
    std::string rest = line.substr(eq + 1);
    Cursor c{rest, 0, lineno};
    Value v = parse_value(c);
    if (!c.done()) throw ParseError(lineno, "trailing characters after value");
    if (sections[current].count(key))
      throw ParseError(lineno, "duplicate key '" + key + "'");
    sections[current][key] = std::move(v);
  }

  SpaceDefinition def;
  def.source = text;
  def.hash_hex = fnv1a_hex(text);

  auto take = [](Section& sec, const std::string& key) -> Value* {
    auto it = sec.find(key);
    return it == sec.end() ? nullptr : &it->second;
  };
  auto reject_leftovers = [](const Section& sec, const std::string& name,
                             const std::set<std::string>& known) {
    for (const auto& [k, v] : sec)
      if (!known.count(k))
        throw ParseError(v.line,
                         "unknown key '" + k + "' in section [" + name + "]");
  };

  if (!sections.count("weights"))
    throw ParseError(1, "missing [weights] section");
  {
    Section& sec = sections["weights"];
    reject_leftovers(sec, "weights", {"m", "n", "tail_rule"});
    Value* m = take(sec, "m");
    Value* n = take(sec, "n");
    if (!m || !n) throw ParseError(1, "[weights] needs both m and n");
    def.weights.m = need_int_array(*m, "m");
    def.weights.n = need_int_array(*n, "n");
    if (Value* t = take(sec, "tail_rule")) {
      std::string rule = need_text(*t, "tail_rule");
      if (rule == "none")
        def.weights.tail = TailRule::None;
      else if (rule == "doubling")
        def.weights.tail = TailRule::Doubling;
      else
        throw ParseError(t->line, "tail_rule must be \"none\" or \"doubling\"");
    }
    try {
      def.weights.validate();
    } catch (const ValidationError& e) {
      throw ParseError(1, e.what());
    }
  }

  if (!sections.count("ground"))
    throw ParseError(1, "missing [ground] section");
  {
    Section& sec = sections["ground"];
    reject_leftovers(sec, "ground", {"dim", "norming_set", "partition"});
    Value* dim = take(sec, "dim");
    Value* ns = take(sec, "norming_set");
    if (!dim || !ns)
      throw ParseError(1, "[ground] needs dim and norming_set");
    def.ground.dim = static_cast<int>(need_int(*dim, "dim"));
    if (ns->kind != Value::Kind::Array)
      throw ParseError(ns->line, "norming_set must be an array of arrays");
    for (const auto& row : ns->array)
      def.ground.norming_set.push_back(
          need_rational_array(row, "norming_set row"));
    def.ground.partition = Partition::round_robin(std::max(def.ground.dim, 1));
    if (Value* p = take(sec, "partition")) {
      if (p->kind == Value::Kind::Text) {
        if (p->text != "round_robin")
          throw ParseError(p->line,
                           "partition must be \"round_robin\" or a period "
                           "array");
      } else {
        auto period = need_int_array(*p, "partition");
        def.ground.partition.period.assign(period.begin(), period.end());
      }
    }
    try {
      def.ground.validate();
    } catch (const ValidationError& e) {
      throw ParseError(1, e.what());
    }
  }

  for (const std::string& name : section_order) {
    if (name == "weights" || name == "ground") continue;
    const std::string prefix = "experiments.";
    if (name.rfind(prefix, 0) != 0)
      throw ParseError(1, "unknown section [" + name + "]");
    ExperimentManifest man;
    man.name = name.substr(prefix.size());
    if (man.name.empty()) throw ParseError(1, "experiment needs a name");
    Section& sec = sections[name];
    reject_leftovers(sec, name,
                     {"kind", "z", "j0", "count", "p", "counts", "signs",
                      "family_size", "width", "mode"});
    Value* kind = take(sec, "kind");
    if (!kind) throw ParseError(1, "[" + name + "] needs a kind");
    man.kind = need_text(*kind, "kind");
    if (Value* v = take(sec, "z")) man.z = need_rational_array(*v, "z");
    if (Value* v = take(sec, "j0"))
      man.j0 = static_cast<int>(need_int(*v, "j0"));
    if (Value* v = take(sec, "count")) man.count = need_int(*v, "count");
    if (Value* v = take(sec, "p")) man.p_list = need_rational_array(*v, "p");
    if (Value* v = take(sec, "counts"))
      man.counts = need_int_array(*v, "counts");
    if (Value* v = take(sec, "signs")) {
      man.signs = need_text(*v, "signs");
      if (man.signs != "positive" && man.signs != "alternating")
        throw ParseError(v->line, "signs must be \"positive\" or \"alternating\"");
    }
    if (Value* v = take(sec, "family_size"))
      man.family_size = need_int(*v, "family_size");
    if (Value* v = take(sec, "width")) {
      man.width = need_rational(*v, "width");
      if (man.width <= 0) throw ParseError(v->line, "width must be positive");
    }
    if (Value* v = take(sec, "mode")) {
      std::string mode = need_text(*v, "mode");
      if (mode == "extended")
        man.extended = true;
      else if (mode != "truncated")
        throw ParseError(v->line, "mode must be \"truncated\" or \"extended\"");
    }
    static const std::set<std::string> kinds = {"quotient", "blocks",
                                                "cesaro", "ell1"};
    if (!kinds.count(man.kind))
      throw ParseError(kind->line, "unknown experiment kind '" + man.kind + "'");
    def.experiments.push_back(std::move(man));
  }
  return def;
}

std::string serialize_space_definition(const SpaceDefinition& def) {
  std::ostringstream out;
  out << "[weights]\n";
  auto ints = [&](const std::vector<long>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i)
      s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
  };
  out << "m = " << ints(def.weights.m) << "\n";
  out << "n = " << ints(def.weights.n) << "\n";
  out << "tail_rule = \""
      << (def.weights.tail == TailRule::Doubling ? "doubling" : "none")
      << "\"\n\n";
  out << "[ground]\n";
  out << "dim = " << def.ground.dim << "\n";
  out << "norming_set = [";
  for (size_t i = 0; i < def.ground.norming_set.size(); ++i) {
    if (i) out << ", ";
    out << "[";
    const auto& row = def.ground.norming_set[i];
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << ", ";
      out << '"' << rat_str(row[j]) << '"';
    }
    out << "]";
  }
  out << "]\n";
  if (def.ground.partition.is_round_robin(def.ground.dim)) {
    out << "partition = \"round_robin\"\n";
  } else {
    out << "partition = [";
    for (size_t i = 0; i < def.ground.partition.period.size(); ++i)
      out << (i ? ", " : "") << def.ground.partition.period[i];
    out << "]\n";
  }
  for (const auto& man : def.experiments) {
    out << "\n[experiments." << man.name << "]\n";
    out << "kind = \"" << man.kind << "\"\n";
    if (!man.z.empty()) {
      out << "z = [";
      for (size_t i = 0; i < man.z.size(); ++i)
        out << (i ? ", " : "") << '"' << rat_str(man.z[i]) << '"';
      out << "]\n";
      out << "j0 = " << man.j0 << "\n";
    }
    if (man.count) out << "count = " << man.count << "\n";
    if (!man.p_list.empty()) {
      out << "p = [";
      for (size_t i = 0; i < man.p_list.size(); ++i)
        out << (i ? ", " : "") << '"' << rat_str(man.p_list[i]) << '"';
      out << "]\n";
    }
    if (!man.counts.empty()) {
      out << "counts = " << ints(man.counts) << "\n";
      out << "signs = \"" << man.signs << "\"\n";
    }
    if (man.family_size) out << "family_size = " << man.family_size << "\n";
    out << "width = \"" << rat_str(man.width) << "\"\n";
    out << "mode = \"" << (man.extended ? "extended" : "truncated") << "\"\n";
  }
  return out.str();
}

}  // namespace mtn
