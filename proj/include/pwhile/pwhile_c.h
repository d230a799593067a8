/* Copyright (c) pwhile contributors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the pwhile analyzer. All functions are thread-safe; programs are
 * immutable after parsing. Strings returned through out-parameters are
 * malloc'd by the library and must be released with pw_string_free.
 */
#ifndef PWHILE_C_H
#define PWHILE_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pw_program_s pw_program;

/* Status codes double as CLI exit codes. */
typedef enum {
    PW_OK = 0,
    PW_ERR_INVALID = 1,  /* bad arguments, bad config, unknown loop label */
    PW_ERR_ANALYSIS = 2, /* analysis failed or verdicts not all certified */
    PW_ERR_PARSE = 3,    /* program or expression syntax error */
    PW_ERR_INTERNAL = 4
} pw_status;

const char* pw_version(void);

/* Parses a pWhile program. On success *out_prog owns the program. On failure
 * *out_error (when non-NULL) receives a message with line/column info. */
pw_status pw_program_parse(const char* source, pw_program** out_prog, char** out_error);
void pw_program_free(pw_program* prog);

/* Canonical single-line form of the parsed program. */
char* pw_program_print(const pw_program* prog);

/* Expected-cost analysis. config_json may be NULL or "{}"; recognised keys:
 *   "degree": int            template degree cap (default 2)
 *   "strategies": [string]   subset of "decompose", "invariant", "unroll"
 *   "horizon": int           oracle horizon for cross-checks (default 200)
 *   "fuel": int              unroll fuel (default 8)
 *   "seed": int              sampling seed (default 0)
 *   "json": bool             JSON report instead of text (default false)
 *   "grid": {var: [int]}     extra cross-check points per variable
 * Returns PW_OK when the bound is certified (including with numeric-only
 * certificates), PW_ERR_ANALYSIS when the analysis failed. The report is
 * produced in both cases. */
pw_status pw_analyze(const pw_program* prog, const char* config_json, char** out_report,
                     char** out_error);

/* Monte Carlo simulation plus the exhaustive oracle when the state space
 * permits. config_json keys: "store" {var: int}, "samples", "seed",
 * "horizon", "json". */
pw_status pw_simulate(const pw_program* prog, const char* config_json, char** out_report,
                      char** out_error);

/* Upper-invariant checking. invariants_text holds lines
 * "loopN: cost-expression". Returns PW_OK only when every loop of the
 * program is certified. */
pw_status pw_check(const pw_program* prog, const char* invariants_text, const char* config_json,
                   char** out_report, char** out_error);

void pw_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PWHILE_C_H */
