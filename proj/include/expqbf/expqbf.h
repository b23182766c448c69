/* C interface to the expqbf solver library. All handles are opaque; every
 * fallible call returns an expqbf_status and leaves a message retrievable
 * with expqbf_last_error() (per thread). */
#ifndef EXPQBF_EXPQBF_H
#define EXPQBF_EXPQBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(EXPQBF_BUILDING_LIBRARY)
#define EXPQBF_API __attribute__((visibility("default")))
#else
#define EXPQBF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct expqbf_formula expqbf_formula;
typedef struct expqbf_solver expqbf_solver;
typedef struct expqbf_certificate expqbf_certificate;

typedef enum expqbf_status {
  EXPQBF_OK = 0,
  EXPQBF_ERR_INVALID_ARGUMENT = 1,
  EXPQBF_ERR_PARSE = 2,
  EXPQBF_ERR_IO = 3,
  EXPQBF_ERR_FORMULA = 4,
  EXPQBF_ERR_WRONG_DOMAIN = 5,
  EXPQBF_ERR_CONFLICTING_ASSIGNMENTS = 6,
  EXPQBF_ERR_TOO_LARGE = 7,
  EXPQBF_ERR_TRACE_UNAVAILABLE = 8,
  EXPQBF_ERR_INVARIANT_VIOLATION = 9,
  EXPQBF_ERR_SPAWN_FAILURE = 10,
  EXPQBF_ERR_PROTOCOL_VIOLATION = 11,
  EXPQBF_ERR_OUT_OF_MEMORY = 12,
  EXPQBF_ERR_INTERNAL = 13
} expqbf_status;

typedef enum expqbf_verdict {
  EXPQBF_UNKNOWN = 0,
  EXPQBF_TRUE = 10,
  EXPQBF_FALSE = 20
} expqbf_verdict;

typedef enum expqbf_init_mode {
  EXPQBF_INIT_PER_BLOCK = 0,
  EXPQBF_INIT_RANDOM = 1,
  EXPQBF_INIT_ALL_FALSE = 2,
  EXPQBF_INIT_ALL_TRUE = 3
} expqbf_init_mode;

EXPQBF_API const char* expqbf_version(void);
EXPQBF_API const char* expqbf_last_error(void);
EXPQBF_API const char* expqbf_status_name(expqbf_status status);
EXPQBF_API void expqbf_string_free(char* s);

/* Formulas */
EXPQBF_API expqbf_status expqbf_formula_parse_file(const char* path, expqbf_formula** out);
EXPQBF_API expqbf_status expqbf_formula_parse_string(const char* text, size_t length, expqbf_formula** out);
EXPQBF_API void expqbf_formula_free(expqbf_formula* f);

EXPQBF_API size_t expqbf_formula_num_vars(const expqbf_formula* f);
EXPQBF_API size_t expqbf_formula_num_universals(const expqbf_formula* f);
EXPQBF_API size_t expqbf_formula_num_existentials(const expqbf_formula* f);
EXPQBF_API size_t expqbf_formula_num_clauses(const expqbf_formula* f);
EXPQBF_API size_t expqbf_formula_num_blocks(const expqbf_formula* f);

/* Parse warnings; the returned string lives as long as the formula. */
EXPQBF_API size_t expqbf_formula_warning_count(const expqbf_formula* f);
EXPQBF_API const char* expqbf_formula_warning(const expqbf_formula* f, size_t index, size_t* line);

/* Canonical QDIMACS text; release with expqbf_string_free. */
EXPQBF_API expqbf_status expqbf_formula_write(const expqbf_formula* f, char** out);

typedef struct expqbf_generator_params {
  int min_blocks;
  int max_blocks;
  int max_vars;
  int max_clauses;
  int min_width;
  int max_width;
} expqbf_generator_params;

EXPQBF_API void expqbf_generator_params_init(expqbf_generator_params* params);
EXPQBF_API expqbf_status expqbf_formula_generate(uint64_t seed, const expqbf_generator_params* params,
                                                 expqbf_formula** out);

/* Brute-force decision, for small formulas only. */
EXPQBF_API expqbf_status expqbf_oracle_decide(const expqbf_formula* f, expqbf_verdict* out);

/* Solving */
typedef struct expqbf_config {
  expqbf_init_mode init_mode;
  uint64_t seed;
  uint64_t reset_period;           /* 0 = never */
  uint64_t reset_memory_threshold; /* live literals; 0 = never */
  int multi_extract;
  int verify_invariants;
  int rebuild_on_reset;
  int certificate;
  double time_limit_seconds; /* <= 0: none */
  uint64_t max_iterations;   /* 0: none */
  const char* external_solver; /* NULL: bundled solver */
} expqbf_config;

EXPQBF_API void expqbf_config_init(expqbf_config* config);

EXPQBF_API expqbf_status expqbf_solver_new(const expqbf_formula* f, const expqbf_config* config,
                                           expqbf_solver** out);
EXPQBF_API expqbf_status expqbf_solver_run(expqbf_solver* s, expqbf_verdict* out);
/* Safe to call from another thread while expqbf_solver_run is active. */
EXPQBF_API void expqbf_solver_interrupt(expqbf_solver* s);
EXPQBF_API void expqbf_solver_free(expqbf_solver* s);

typedef struct expqbf_iteration_stats {
  uint64_t iteration;
  size_t a_size;
  size_t s_size;
  size_t new_a;
  size_t new_s;
  uint64_t forall_conflicts;
  uint64_t exists_conflicts;
  size_t forall_clauses;
  size_t exists_clauses;
  double forall_seconds;
  double exists_seconds;
  int reset;
  expqbf_verdict terminal;
} expqbf_iteration_stats;

typedef struct expqbf_summary {
  expqbf_verdict verdict;
  uint64_t iterations;
  size_t a_size;
  size_t s_size;
  uint64_t resets;
  uint64_t growth_violations;
  uint64_t completion_violations;
  uint64_t bound_violations;
  double seconds;
} expqbf_summary;

EXPQBF_API size_t expqbf_solver_iteration_count(const expqbf_solver* s);
EXPQBF_API expqbf_status expqbf_solver_iteration(const expqbf_solver* s, size_t index, expqbf_iteration_stats* out);
EXPQBF_API expqbf_status expqbf_solver_summary(const expqbf_solver* s, expqbf_summary* out);
/* Only after a FALSE verdict with config.certificate set. */
EXPQBF_API expqbf_status expqbf_solver_certificate(const expqbf_solver* s, expqbf_certificate** out);

/* Certificates */
EXPQBF_API expqbf_status expqbf_certificate_read_file(const char* path, expqbf_certificate** out);
EXPQBF_API expqbf_status expqbf_certificate_read_string(const char* text, size_t length, expqbf_certificate** out);
EXPQBF_API expqbf_status expqbf_certificate_write_file(const expqbf_certificate* c, const char* path);
EXPQBF_API expqbf_status expqbf_certificate_write(const expqbf_certificate* c, char** out);
EXPQBF_API size_t expqbf_certificate_axiom_count(const expqbf_certificate* c);
EXPQBF_API size_t expqbf_certificate_trace_length(const expqbf_certificate* c);
/* *valid is 1 or 0; *reason is a static string ("valid" when accepted). */
EXPQBF_API expqbf_status expqbf_certificate_check(const expqbf_formula* f, const expqbf_certificate* c, int* valid,
                                                  const char** reason);
EXPQBF_API void expqbf_certificate_free(expqbf_certificate* c);

#ifdef __cplusplus
}
#endif

#endif
