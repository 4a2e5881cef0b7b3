/* C interface to the mixed-Tsirelson norm library. Handles are opaque;
 * every entry point returns a status code and leaves a description of the
 * last failure in mtn_last_error(). Strings returned through accessors are
 * owned by the handle they came from and stay valid until it is destroyed.
 */
#ifndef MTN_H
#define MTN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mtn_space mtn_space;
typedef struct mtn_vector mtn_vector;
typedef struct mtn_report mtn_report;

enum mtn_status {
  MTN_OK = 0,
  MTN_ERR_PARSE = 1,      /* malformed input text */
  MTN_ERR_VALIDATION = 2, /* structurally valid but violates an invariant */
  MTN_ERR_ARGUMENT = 3,   /* null handle or bad argument */
  MTN_ERR_LIMIT = 4,      /* enumeration or size guard tripped */
  MTN_ERR_INTERNAL = 5
};

/* Outcome of a check or experiment carried inside a report. */
enum mtn_outcome {
  MTN_OUTCOME_PASS = 0,
  MTN_OUTCOME_FAIL = 1,
  MTN_OUTCOME_SKIPPED = 3
};

const char* mtn_version(void);
const char* mtn_last_error(void);

/* Space definitions (sectioned text; see the README for the format). */
int mtn_space_create_from_string(const char* text, mtn_space** out);
int mtn_space_create_from_file(const char* path, mtn_space** out);
void mtn_space_destroy(mtn_space* space);
const char* mtn_space_hash_hex(const mtn_space* space);

/* Finitely supported rational vectors: "1 -1 3/2" or "2:1 7:-1/3". */
int mtn_vector_parse(const char* text, mtn_vector** out);
void mtn_vector_destroy(mtn_vector* vec);

/* Certified norm enclosure. target_width is a rational like "1/1000000000";
 * extended_mode nonzero applies the weight tail to upper bounds. */
int mtn_norm(const mtn_space* space, const mtn_vector* vec,
             const char* target_width, int extended_mode, mtn_report** out);

/* Randomized suites: "lemma33", "lemma34", "lemma41", "lemma42", "lift",
 * "jtree". */
int mtn_check_suite(const mtn_space* space, const char* suite, int count,
                    unsigned long long seed, mtn_report** out);

/* Runs a named experiment from the definition and writes its artifacts
 * into out_dir (pass NULL to skip writing files). */
int mtn_experiment(const mtn_space* space, const char* name,
                   const char* out_dir, mtn_report** out);

/* Norm on a value-labelled rooted tree, "(1 (2 (3)) (4))" or JSON. */
int mtn_jtree_norm(const char* text, mtn_report** out);

const char* mtn_report_json(const mtn_report* report);
int mtn_report_outcome(const mtn_report* report);
void mtn_report_destroy(mtn_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MTN_H */
