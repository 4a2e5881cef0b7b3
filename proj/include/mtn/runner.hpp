#pragma once

#include "mtn/analysis.hpp"
#include "mtn/jtree.hpp"
#include "mtn/spacefile.hpp"

namespace mtn {

enum class SuiteOutcome { Pass, Fail, Skipped };

struct SuiteReport {
  std::string suite;
  SuiteOutcome outcome = SuiteOutcome::Pass;
  int requested = 0;
  int executed = 0;
  int failures = 0;
  std::string skip_reason;
  std::vector<std::string> failure_details;
  std::string to_json(const SpaceDefinition& def) const;
};

// Randomized suites: lemma33, lemma34, lemma41, lemma42, lift, jtree.
// Skips (with a reason) when the definition cannot satisfy the suite's
// hypotheses.
SuiteReport run_check_suite(const SpaceDefinition& def,
                            const std::string& suite, int count,
                            unsigned long long seed);

struct ExperimentOutput {
  std::string name;
  bool ok = false;
  std::string json;  // summary report
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
};

ExperimentOutput run_experiment(const SpaceDefinition& def,
                                const std::string& name);

// Engine run serialized for the command line: enclosure, sweep count and
// the witness tree, rationals as "p/q" strings with decimal annotations.
std::string norm_report_json(const SpaceDefinition& def, const FiniteVector& x,
                             const Rat& width, bool extended);

std::string jtree_report_json(const TreeVector& tv);

}  // namespace mtn
