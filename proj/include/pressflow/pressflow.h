#ifndef PRESSFLOW_H
#define PRESSFLOW_H

/*
 * C interface to the pressflow pipeline. Embedders (the CLI included) build
 * an option bag, run a stage by name, and read errors off the calling
 * thread. All strings are UTF-8, all returned pointers stay owned by the
 * library.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
    PF_OK = 0,
    PF_USAGE_ERROR = 1, /* bad or missing options */
    PF_DATA_ERROR = 2,  /* malformed or inconsistent input data */
    PF_IO_ERROR = 3     /* missing files, unwritable outputs */
} pf_status;

/* Ordered key=value bag. Later entries override earlier ones for
 * single-valued keys; multi-valued keys (e.g. "input") keep every entry. */
typedef struct pf_options pf_options;

pf_options* pf_options_new(void);
void pf_options_free(pf_options* options);
pf_status pf_options_set(pf_options* options, const char* key, const char* value);
/* Appends every entry of a key=value config file (# comments allowed),
 * such as the run_config_<stage>.txt a stage writes next to its outputs. */
pf_status pf_options_load_file(pf_options* options, const char* path);

/* Runs one stage against the options. Stage names are the subcommand names:
 * score, tag, ingest-census, build-dataset, train, predict, evaluate,
 * report, generate-fixture, pipeline. */
pf_status pf_run(const char* stage, const pf_options* options);

/* Message from the last failing call on the calling thread, or "" if the
 * last call succeeded. Never NULL; valid until the thread's next call. */
const char* pf_last_error(void);

/* Diagnostic lines (one per call, no trailing newline). NULL restores the
 * default stderr sink. */
typedef void (*pf_log_handler)(const char* line, void* user);
void pf_set_log_handler(pf_log_handler handler, void* user);
void pf_set_verbose(int on);

/* NULL-terminated list of runnable stage names. */
const char* const* pf_stage_names(void);

#ifdef __cplusplus
}
#endif

#endif /* PRESSFLOW_H */
