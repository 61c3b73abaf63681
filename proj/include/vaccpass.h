/*
 * vaccpass — privacy-preserving vaccination passport toolkit.
 *
 * C interface to the vaccpass core library.  All functions return a
 * vp_status; VP_OK means success and anything else is an error whose
 * human-readable message can be fetched with vp_last_error() (valid on the
 * calling thread until the next vaccpass call).  Objects are opaque handles
 * created and destroyed with the matching *_free function.  Strings returned
 * through `char**` out-parameters are heap-allocated and must be released
 * with vp_string_free().
 */

#ifndef VACCPASS_H
#define VACCPASS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VP_API __declspec(dllexport)
#else
#define VP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vp_status {
    VP_OK = 0,
    VP_ERR_INVALID_ARGUMENT = 1,
    VP_ERR_DIMENSION = 2,
    VP_ERR_VALIDATION = 3,
    VP_ERR_UNAUTHORIZED = 4,
    VP_ERR_BAD_SIGNATURE = 5,
    VP_ERR_OUT_OF_RANGE = 6,
    VP_ERR_EMPTY_INPUT = 7,
    VP_ERR_NO_VALID_BITS = 8,
    VP_ERR_TOO_LARGE = 9,
    VP_ERR_DUPLICATE = 10,
    VP_ERR_NOT_FOUND = 11,
    VP_ERR_IO = 12,
    VP_ERR_PARSE = 13,
    VP_ERR_STATE = 14,
    VP_ERR_BOUNDS = 15,
    VP_ERR_CHAIN = 16,
    VP_ERR_INTERNAL = 17
} vp_status;

/* Library version string, e.g. "0.1.0".  Static storage; do not free. */
VP_API const char* vp_version(void);

/* Message for the most recent error on this thread.  Static storage. */
VP_API const char* vp_last_error(void);

/* Release a string returned through a char** out-parameter. */
VP_API void vp_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

typedef struct vp_config vp_config;

/* Create a configuration populated with defaults. */
VP_API vp_status vp_config_create(vp_config** out);

/* Overlay keys from a JSON file onto an existing configuration. */
VP_API vp_status vp_config_load_json(vp_config* cfg, const char* path);

/* Set a single key from its string form (e.g. "seed", "42"). */
VP_API vp_status vp_config_set(vp_config* cfg, const char* key, const char* value);

/* Get a single key as a string. */
VP_API vp_status vp_config_get(const vp_config* cfg, const char* key, char** out_value);

/* Full configuration as a JSON object. */
VP_API vp_status vp_config_to_json(const vp_config* cfg, char** out_json);

VP_API void vp_config_free(vp_config* cfg);

/* ------------------------------------------------------------------ */
/* Synthetic biometric datasets                                        */
/* ------------------------------------------------------------------ */

typedef struct vp_dataset vp_dataset;

/* Generate a dataset from cfg (subjects, samples_per_subject, p_intra,
 * mask_density, rows, cols, seed). */
VP_API vp_status vp_synth_generate(const vp_config* cfg, vp_dataset** out);

VP_API vp_status vp_dataset_save(const vp_dataset* ds, const char* path);
VP_API vp_status vp_dataset_load(const char* path, vp_dataset** out);

/* Shape and generation parameters as a JSON object. */
VP_API vp_status vp_dataset_info(const vp_dataset* ds, char** out_json);

/* Write one (template, mask) scan pair to a standalone scan file. */
VP_API vp_status vp_dataset_export_scan(const vp_dataset* ds, size_t subject, size_t sample,
                                        const char* path);

VP_API void vp_dataset_free(vp_dataset* ds);

/* ------------------------------------------------------------------ */
/* Evaluation harness                                                  */
/* ------------------------------------------------------------------ */

/* Sweep thresholds (strictly ascending, within [0,1]) over the dataset and
 * write a FAR/FRR table to out_path.  domain is "raw" or "hashed"; format is
 * "csv" or "jsonl". */
VP_API vp_status vp_eval_far_frr(const vp_dataset* ds, const vp_config* cfg, const char* domain,
                                 const double* thresholds, size_t n_thresholds,
                                 const char* out_path, const char* format);

/* Run the security probe suite (predictor advantage, preimage census,
 * marginal entropy).  Pass 0 for advantage_trials / census_n / census_m /
 * census_trials to use the defaults (5000, 12, 4, 50).  out_all_ok receives
 * 1 when every probe met its bound. */
VP_API vp_status vp_eval_security(const vp_config* cfg, size_t advantage_trials, size_t census_n,
                                  size_t census_m, size_t census_trials, char** out_json,
                                  int* out_all_ok);

/* Execute a scripted multi-node scenario (a JSON list of steps) and return
 * the JSONL transcript. */
VP_API vp_status vp_scenario_run(const char* scenario_path, const vp_config* cfg,
                                 char** out_transcript);

/* ------------------------------------------------------------------ */
/* Ternary projection hashing                                          */
/* ------------------------------------------------------------------ */

typedef struct vp_projection vp_projection;

/* Sample m ternary projection vectors of length n from seed. */
VP_API vp_status vp_projection_sample(size_t n, size_t m, uint64_t seed, vp_projection** out);

VP_API vp_status vp_projection_save(const vp_projection* ps, const char* path);
VP_API vp_status vp_projection_load(const char* path, vp_projection** out);

VP_API vp_status vp_projection_info(const vp_projection* ps, size_t* out_n, size_t* out_m,
                                    uint64_t* out_seed);

VP_API void vp_projection_free(vp_projection* ps);

/* Hash an n-bit input (hex, most-significant-bit-first packing) to an m-bit
 * hash, returned in the same hex form. */
VP_API vp_status vp_lsh_hash_hex(const vp_projection* ps, const char* x_hex, char** out_hex);

/* Exhaustively count the preimages of an m-bit hash (hex).  Only available
 * for n <= 20. */
VP_API vp_status vp_lsh_preimage_count(const vp_projection* ps, const char* hash_hex,
                                       size_t* out_count);

/* Exhaustive preimage census over `trials` fresh (projection set, input)
 * draws at small (n <= 20, m <= n).  Returns a JSON object with the per-trial
 * counts, their median and the 2^(n-m) reference. */
VP_API vp_status vp_lsh_preimage_census(size_t n, size_t m, size_t trials, uint64_t seed,
                                        char** out_json);

/* Empirical advantage of the best single-bit predictor of any input bit from
 * the hash, over `trials` random inputs (>= 1000). */
VP_API vp_status vp_lsh_bit_balance(const vp_projection* ps, size_t trials, uint64_t seed,
                                    double* out_max, double* out_mean);

/* Measure hash locality on synthetic pairs at the given angles (radians,
 * each in [0, pi/2]).  Returns a JSON array of per-angle rows. */
VP_API vp_status vp_lsh_eval_locality(const double* thetas, size_t n_thetas,
                                      size_t pairs_per_angle, size_t n, size_t weight, size_t m,
                                      uint64_t seed, char** out_json);

/* Marginal-entropy estimate (bits) of the feature vectors extracted from a
 * dataset under cfg's masking mode. */
VP_API vp_status vp_lsh_entropy(const vp_dataset* ds, const vp_config* cfg, double* out_bits,
                                size_t* out_samples);

/* ------------------------------------------------------------------ */
/* Permissioned ledger workspaces                                      */
/* ------------------------------------------------------------------ */

typedef struct vp_ledger vp_ledger;

/* Create a ledger workspace in dir: a genesis chain for num_parties
 * round-robin producers plus the party key file.  empty_blocks controls
 * whether block production emits empty blocks. */
VP_API vp_status vp_ledger_init(const char* dir, size_t num_parties, uint64_t seed,
                                int empty_blocks);

VP_API vp_status vp_ledger_open(const char* dir, vp_ledger** out);
VP_API vp_status vp_ledger_save(const vp_ledger* lg, const char* dir);

/* Advance the chain by `count` production slots.  out_height (optional)
 * receives the resulting number of blocks. */
VP_API vp_status vp_ledger_tick(vp_ledger* lg, size_t count, uint64_t* out_height);

VP_API vp_status vp_ledger_height(const vp_ledger* lg, uint64_t* out_height);

/* Re-validate the chain.  out_ok receives 1/0; on failure out_what (optional)
 * receives the reason. */
VP_API vp_status vp_ledger_verify(const vp_ledger* lg, int* out_ok, char** out_what);

/* One block (by height) as a JSON object. */
VP_API vp_status vp_ledger_show(const vp_ledger* lg, uint64_t height, char** out_json);

/* The whole chain as JSONL, one block per line. */
VP_API vp_status vp_ledger_export(const vp_ledger* lg, char** out_jsonl);

VP_API void vp_ledger_free(vp_ledger* lg);

/* ------------------------------------------------------------------ */
/* Passport nodes                                                      */
/* ------------------------------------------------------------------ */

typedef struct vp_node vp_node;

/* Derive system parameters from cfg and write them into an existing ledger
 * workspace (params.json).  dataset_path may be NULL unless cfg's masking
 * mode requires a population-wide mask, in which case it names the dataset
 * the mask is derived from. */
VP_API vp_status vp_passport_setup(const vp_config* cfg, const char* dataset_path,
                                   const char* dir);

/* Open node node_index of a workspace (chain, params, keys, node state). */
VP_API vp_status vp_node_open(const char* dir, size_t node_index, vp_node** out);

/* Persist the node's chain and local state back into its workspace. */
VP_API vp_status vp_node_save(vp_node* node);

/* Enroll a user; returns the pseudonymous identifier as hex. */
VP_API vp_status vp_node_enroll(vp_node* node, const char* dob, const char* gender,
                                const char* scan_path, const char* record_json,
                                char** out_id_hex);

/* Authenticate; out_found receives 1/0 and out_id_hex the identifier when
 * found (NULL otherwise). */
VP_API vp_status vp_node_auth(vp_node* node, const char* dob, const char* gender,
                              const char* scan_path, int* out_found, char** out_id_hex);

/* Append a record, enrolling first if the user is unknown.  out_enrolled
 * receives 1 when a fresh enrollment happened. */
VP_API vp_status vp_node_add_record(vp_node* node, const char* dob, const char* gender,
                                    const char* scan_path, const char* record_json,
                                    char** out_id_hex, int* out_enrolled);

/* Fetch the user's records as a JSON array (authentication must succeed). */
VP_API vp_status vp_node_fetch(vp_node* node, const char* dob, const char* gender,
                               const char* scan_path, char** out_json);

/* Bring the node's local state up to date with its chain. */
VP_API vp_status vp_node_sync(vp_node* node, uint64_t* out_blocks);

VP_API void vp_node_free(vp_node* node);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VACCPASS_H */
