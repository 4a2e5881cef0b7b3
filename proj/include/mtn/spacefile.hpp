#pragma once

#include <string>
#include <vector>

#include "mtn/config.hpp"
#include "mtn/ground.hpp"

namespace mtn {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int ln, const std::string& what)
      : std::runtime_error("line " + std::to_string(ln) + ": " + what),
        line(ln) {}
};

// Named experiment drivers embedded in a space definition.
struct ExperimentManifest {
  std::string name;
  std::string kind;  // "quotient" | "blocks" | "cesaro" | "ell1"
  // quotient
  std::vector<Rat> z;
  int j0 = 1;
  // blocks
  long count = 0;
  std::vector<Rat> p_list;
  // cesaro
  std::vector<long> counts;
  std::string signs = "positive";  // or "alternating"
  // ell1
  long family_size = 0;
  // shared
  Rat width = Rat(1, 1000000000);
  bool extended = false;
};

struct SpaceDefinition {
  WeightConfig weights;
  GroundSpace ground;
  std::vector<ExperimentManifest> experiments;
  std::string source;
  std::string hash_hex;  // FNV-1a of the source text
};

// Sectioned text format: [weights] with integer arrays m, n and a quoted
// tail_rule; [ground] with dim, norming_set (arrays of quoted rationals)
// and partition ("round_robin" or an explicit period array);
// [experiments.NAME] blocks. Unknown sections or keys are rejected.
// Validates every parsed structure before returning.
SpaceDefinition parse_space_definition(const std::string& text);

// Canonical re-serialization; parses back to an equivalent definition.
std::string serialize_space_definition(const SpaceDefinition& def);

std::string fnv1a_hex(const std::string& data);

}  // namespace mtn
