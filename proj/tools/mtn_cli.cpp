// Command-line front end; talks to the library exclusively through the C
// API in mtn.h. Exit codes: 0 pass, 1 check failure, 2 usage/parse error,
// 3 suite skipped because the definition cannot satisfy its hypotheses.

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mtn.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSkipped = 3;

struct SpaceHandle {
  mtn_space* ptr = nullptr;
  ~SpaceHandle() { mtn_space_destroy(ptr); }
};

struct ReportHandle {
  mtn_report* ptr = nullptr;
  ~ReportHandle() { mtn_report_destroy(ptr); }
};

struct VectorHandle {
  mtn_vector* ptr = nullptr;
  ~VectorHandle() { mtn_vector_destroy(ptr); }
};

int fail(const char* stage) {
  std::fprintf(stderr, "mtn: %s: %s\n", stage, mtn_last_error());
  return kExitUsage;
}

int outcome_to_exit(int outcome) {
  switch (outcome) {
    case MTN_OUTCOME_PASS:
      return kExitPass;
    case MTN_OUTCOME_SKIPPED:
      return kExitSkipped;
    default:
      return kExitCheckFailed;
  }
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path);
  ok = static_cast<bool>(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified norm computations in ground-set-saturated spaces"};
  app.require_subcommand(1);

  // norm
  auto* cmd_norm = app.add_subcommand("norm", "certified norm enclosure");
  std::string space_file, vector_text, vector_file, width = "1/1000000000";
  std::string mode = "truncated";
  cmd_norm->add_option("space", space_file, "space definition file")
      ->required();
  auto* vopt = cmd_norm->add_option("--vector", vector_text,
                                    "vector entries, e.g. \"1 -1 3/2\"");
  auto* vfile = cmd_norm->add_option("--vector-file", vector_file,
                                     "file with vector entries");
  cmd_norm->add_option("--width", width, "target enclosure width (rational)");
  cmd_norm->add_option("--mode", mode, "truncated|extended")
      ->check(CLI::IsMember({"truncated", "extended"}));

  // check
  auto* cmd_check = app.add_subcommand("check", "randomized bound suites");
  std::string check_space, suite;
  int count = 100;
  unsigned long long seed = 1;
  cmd_check->add_option("space", check_space, "space definition file")
      ->required();
  cmd_check->add_option("--suite", suite, "suite name")
      ->required()
      ->check(CLI::IsMember(
          {"lemma33", "lemma34", "lemma41", "lemma42", "lift", "jtree"}));
  cmd_check->add_option("--count", count, "instances to run");
  cmd_check->add_option("--seed", seed, "random seed");

  // experiment
  auto* cmd_exp = app.add_subcommand("experiment", "named experiment run");
  std::string exp_space, exp_name, out_dir = ".";
  cmd_exp->add_option("space", exp_space, "space definition file")
      ->required();
  cmd_exp->add_option("--name", exp_name, "experiment name")->required();
  cmd_exp->add_option("--out", out_dir, "output directory");

  // jtree-norm
  auto* cmd_jtree =
      app.add_subcommand("jtree-norm", "norm of a value-labelled tree");
  std::string tree_text, tree_file;
  auto* topt = cmd_jtree->add_option("--tree", tree_text,
                                     "tree text, e.g. \"(1 (2) (3))\"");
  auto* tfile = cmd_jtree->add_option("--file", tree_file, "tree file");

  CLI11_PARSE(app, argc, argv);

  if (cmd_norm->parsed()) {
    if ((vopt->count() == 0) == (vfile->count() == 0)) {
      std::fprintf(stderr,
                   "mtn: norm needs exactly one of --vector/--vector-file\n");
      return kExitUsage;
    }
    if (vfile->count()) {
      bool ok = false;
      vector_text = read_file(vector_file, ok);
      if (!ok) {
        std::fprintf(stderr, "mtn: cannot open '%s'\n", vector_file.c_str());
        return kExitUsage;
      }
    }
    SpaceHandle space;
    if (mtn_space_create_from_file(space_file.c_str(), &space.ptr) != MTN_OK)
      return fail("space");
    VectorHandle vec;
    if (mtn_vector_parse(vector_text.c_str(), &vec.ptr) != MTN_OK)
      return fail("vector");
    ReportHandle rep;
    if (mtn_norm(space.ptr, vec.ptr, width.c_str(), mode == "extended",
                 &rep.ptr) != MTN_OK)
      return fail("norm");
    std::printf("%s\n", mtn_report_json(rep.ptr));
    return kExitPass;
  }

  if (cmd_check->parsed()) {
    SpaceHandle space;
    if (mtn_space_create_from_file(check_space.c_str(), &space.ptr) != MTN_OK)
      return fail("space");
    ReportHandle rep;
    if (mtn_check_suite(space.ptr, suite.c_str(), count, seed, &rep.ptr) !=
        MTN_OK)
      return fail("check");
    std::printf("%s\n", mtn_report_json(rep.ptr));
    return outcome_to_exit(mtn_report_outcome(rep.ptr));
  }

  if (cmd_exp->parsed()) {
    SpaceHandle space;
    if (mtn_space_create_from_file(exp_space.c_str(), &space.ptr) != MTN_OK)
      return fail("space");
    ReportHandle rep;
    if (mtn_experiment(space.ptr, exp_name.c_str(), out_dir.c_str(),
                       &rep.ptr) != MTN_OK)
      return fail("experiment");
    std::printf("%s\n", mtn_report_json(rep.ptr));
    return outcome_to_exit(mtn_report_outcome(rep.ptr));
  }

  if (cmd_jtree->parsed()) {
    if ((topt->count() == 0) == (tfile->count() == 0)) {
      std::fprintf(stderr,
                   "mtn: jtree-norm needs exactly one of --tree/--file\n");
      return kExitUsage;
    }
    if (tfile->count()) {
      bool ok = false;
      tree_text = read_file(tree_file, ok);
      if (!ok) {
        std::fprintf(stderr, "mtn: cannot open '%s'\n", tree_file.c_str());
        return kExitUsage;
      }
    }
    ReportHandle rep;
    if (mtn_jtree_norm(tree_text.c_str(), &rep.ptr) != MTN_OK)
      return fail("jtree-norm");
    std::printf("%s\n", mtn_report_json(rep.ptr));
    return kExitPass;
  }
  return kExitUsage;
}
