#include "mtn.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "mtn/enumerate.hpp"
#include "mtn/runner.hpp"

struct mtn_space {
  mtn::SpaceDefinition def;
};

struct mtn_vector {
  mtn::FiniteVector vec;
};

struct mtn_report {
  std::string json;
  int outcome = MTN_OUTCOME_PASS;
};

namespace {

thread_local std::string g_last_error;

mtn_status set_error(mtn_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const mtn::ParseError& e) {
    return set_error(MTN_ERR_PARSE, e.what());
  } catch (const mtn::CapExceeded& e) {
    return set_error(MTN_ERR_LIMIT, e.what());
  } catch (const mtn::ValidationError& e) {
    return set_error(MTN_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return set_error(MTN_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* mtn_version(void) { return "0.1.0"; }

const char* mtn_last_error(void) { return g_last_error.c_str(); }

int mtn_space_create_from_string(const char* text, mtn_space** out) {
  if (!text || !out) return set_error(MTN_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto space = std::make_unique<mtn_space>();
    space->def = mtn::parse_space_definition(text);
    *out = space.release();
    return MTN_OK;
  });
}

int mtn_space_create_from_file(const char* path, mtn_space** out) {
  if (!path || !out) return set_error(MTN_ERR_ARGUMENT, "null argument");
  std::ifstream in(path);
  if (!in)
    return set_error(MTN_ERR_ARGUMENT,
                     std::string("cannot open '") + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return mtn_space_create_from_string(buf.str().c_str(), out);
}

void mtn_space_destroy(mtn_space* space) { delete space; }

const char* mtn_space_hash_hex(const mtn_space* space) {
  return space ? space->def.hash_hex.c_str() : "";
}

int mtn_vector_parse(const char* text, mtn_vector** out) {
  if (!text || !out) return set_error(MTN_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto v = std::make_unique<mtn_vector>();
    v->vec = mtn::FiniteVector::parse(text);
    *out = v.release();
    return MTN_OK;
  });
}

void mtn_vector_destroy(mtn_vector* vec) { delete vec; }

int mtn_norm(const mtn_space* space, const mtn_vector* vec,
             const char* target_width, int extended_mode, mtn_report** out) {
  if (!space || !vec || !out)
    return set_error(MTN_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    mtn::Rat width(1, 1000000000);
    if (target_width) {
      auto w = mtn::parse_rational(target_width);
      if (!w || *w <= 0)
        return set_error(MTN_ERR_PARSE,
                         "target width must be a positive rational");
      width = *w;
    }
    auto rep = std::make_unique<mtn_report>();
    rep->json = mtn::norm_report_json(space->def, vec->vec, width,
                                      extended_mode != 0);
    *out = rep.release();
    return MTN_OK;
  });
}

int mtn_check_suite(const mtn_space* space, const char* suite, int count,
                    unsigned long long seed, mtn_report** out) {
  if (!space || !suite || !out)
    return set_error(MTN_ERR_ARGUMENT, "null argument");
  if (count < 1) return set_error(MTN_ERR_ARGUMENT, "count must be >= 1");
  *out = nullptr;
  return guarded([&] {
    mtn::SuiteReport rep =
        mtn::run_check_suite(space->def, suite, count, seed);
    auto r = std::make_unique<mtn_report>();
    r->json = rep.to_json(space->def);
    switch (rep.outcome) {
      case mtn::SuiteOutcome::Pass:
        r->outcome = MTN_OUTCOME_PASS;
        break;
      case mtn::SuiteOutcome::Fail:
        r->outcome = MTN_OUTCOME_FAIL;
        break;
      default:
        r->outcome = MTN_OUTCOME_SKIPPED;
    }
    *out = r.release();
    return MTN_OK;
  });
}

int mtn_experiment(const mtn_space* space, const char* name,
                   const char* out_dir, mtn_report** out) {
  if (!space || !name || !out)
    return set_error(MTN_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    mtn::ExperimentOutput res = mtn::run_experiment(space->def, name);
    if (out_dir) {
      std::filesystem::create_directories(out_dir);
      for (const auto& [fname, content] : res.files) {
        std::ofstream of(std::filesystem::path(out_dir) / fname);
        if (!of)
          return set_error(MTN_ERR_ARGUMENT,
                           "cannot write into '" + std::string(out_dir) + "'");
        of << content;
      }
    }
    auto r = std::make_unique<mtn_report>();
    r->json = res.json;
    r->outcome = res.ok ? MTN_OUTCOME_PASS : MTN_OUTCOME_FAIL;
    *out = r.release();
    return MTN_OK;
  });
}

int mtn_jtree_norm(const char* text, mtn_report** out) {
  if (!text || !out) return set_error(MTN_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    mtn::TreeVector tv = mtn::TreeVector::parse(text);
    auto r = std::make_unique<mtn_report>();
    r->json = mtn::jtree_report_json(tv);
    *out = r.release();
    return MTN_OK;
  });
}

const char* mtn_report_json(const mtn_report* report) {
  return report ? report->json.c_str() : "";
}

int mtn_report_outcome(const mtn_report* report) {
  return report ? report->outcome : MTN_OUTCOME_FAIL;
}

void mtn_report_destroy(mtn_report* report) { delete report; }

}  // extern "C"
