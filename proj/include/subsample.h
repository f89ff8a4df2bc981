/* C API for the subsample library: dual-barrier point selection with
 * certified frame bounds, blocked-region grids, weighted least-squares
 * recovery, and the brute-force verification battery.
 *
 * All entry points are thread-compatible: distinct jobs may run on distinct
 * threads; a single job must not be shared without external locking.
 * Returned buffers stay owned by the job and remain valid until the next
 * command on that job or ss_job_free.
 */
#ifndef SUBSAMPLE_H
#define SUBSAMPLE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ss_job ss_job;

typedef enum ss_status {
  SS_OK = 0,
  SS_ERROR_CONFIG = 2,        /* malformed or inconsistent configuration */
  SS_ERROR_SELECTION = 3,     /* the greedy selection could not finish */
  SS_ERROR_CERTIFICATION = 4, /* outputs written, certification failed */
  SS_ERROR_INVALID = 5,       /* null handle or argument misuse */
  SS_ERROR_INTERNAL = 6       /* invariant breach inside the library */
} ss_status;

/* Creates a job from a JSON run configuration (schema_version 1; unknown
 * keys are rejected). On failure returns NULL and, if status is non-null,
 * the failing code. */
ss_job* ss_job_create(const char* config_json, ss_status* status);

/* Creates a configuration-less job; only ss_job_verify may run on it. */
ss_job* ss_job_create_empty(void);

void ss_job_free(ss_job* job);

/* Message describing the most recent failure on this job ("" if none). */
const char* ss_job_error(const ss_job* job);

/* Message from the most recent failure on the calling thread, covering
 * failures that happen before a job exists (e.g. ss_job_create). */
const char* ss_last_error(void);

/* Replaces the configured seed (CLI --seed override). */
ss_status ss_job_override_seed(ss_job* job, uint64_t seed);

/* Caps candidate-batch parallelism (1 = fully deterministic baseline). */
ss_status ss_job_set_threads(ss_job* job, int threads);

/* Runs the selection and certification; produces points.csv, report.json,
 * trace.csv (and snapshots.json when configured). Returns
 * SS_ERROR_CERTIFICATION when outputs exist but the certificate failed. */
ss_status ss_job_sparsify(ss_job* job);

/* Evaluates the acceptance indicator on a regular grid at a snapshot
 * iteration (-1 = final); produces grid.csv. */
ss_status ss_job_grid(ss_job* job, int resolution, int iteration);

/* Runs the constructive recovery pipeline against a JSON target spec;
 * produces recovery.json. */
ss_status ss_job_recover(ss_job* job, const char* target_json);

/* Runs the brute-force oracle battery; produces verify.json. */
ss_status ss_job_verify(ss_job* job, uint64_t seed);

/* Outputs produced by the last command. */
int ss_job_output_count(const ss_job* job);
const char* ss_job_output_name(const ss_job* job, int index);
const char* ss_job_output_data(const ss_job* job, int index);

/* Library version, encoded as major * 10000 + minor * 100 + patch. */
unsigned ss_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SUBSAMPLE_H */
