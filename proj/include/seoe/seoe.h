/*
 * seoe - semantic evaluation toolkit for open-domain event detection.
 *
 * C API over the C++ core. All functions are thread-compatible: distinct
 * sessions may be used from distinct threads; a single session must not be
 * shared without external synchronization. Strings are UTF-8. Functions
 * return SEOE_OK on success; on failure the session stores a message
 * retrievable with seoe_session_last_error().
 */
#ifndef SEOE_H
#define SEOE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seoe_status {
    SEOE_OK = 0,
    SEOE_ERR_VALIDATION = 1,
    SEOE_ERR_PARSE = 2,
    SEOE_ERR_CONFIG = 3,
    SEOE_ERR_PROVIDER = 4,
    SEOE_ERR_IO = 5,
    SEOE_ERR_EMPTY_MENTION = 6,
    SEOE_ERR_DEFINITION = 7,
    SEOE_ERR_ANNOTATION = 8,
    SEOE_ERR_ROUND = 9,
    SEOE_ERR_INFERENCE = 10,
    SEOE_ERR_JUDGE = 11,
    SEOE_ERR_INTERNAL = 12
} seoe_status;

typedef struct seoe_session seoe_session;

seoe_session* seoe_session_new(void);
void seoe_session_free(seoe_session* session);

/* Message of the most recent failure on this session. Owned by the session;
 * valid until the next API call on it. Never NULL. */
const char* seoe_session_last_error(const seoe_session* session);

/* ---- configuration ----------------------------------------------------- */

/* Routes all chat/embedding traffic to a scripted mock. */
seoe_status seoe_session_set_mock_script(seoe_session* session, const char* path);

/* Response cache location. Stage commands default to ./seoe_cache;
 * seoe_pipeline defaults to <out_dir>/cache. */
seoe_status seoe_session_set_cache_dir(seoe_session* session, const char* path);

/* NULL keeps the SEOE_BASE_URL / SEOE_EMBED_BASE_URL / SEOE_API_KEY values. */
seoe_status seoe_session_set_provider(seoe_session* session, const char* chat_base_url,
                                      const char* embed_base_url, const char* api_key);

seoe_status seoe_session_set_max_concurrency(seoe_session* session, int max_concurrency);
seoe_status seoe_session_set_retry(seoe_session* session, int max_attempts,
                                   int initial_backoff_ms);

/* "debug" | "info" | "warn" | "error" | "off" (process-wide). */
seoe_status seoe_session_set_log_level(seoe_session* session, const char* level);

/* ---- pipeline stages ----------------------------------------------------
 * All parameters are file or directory paths unless noted.
 */

seoe_status seoe_integrate(seoe_session* session, const char* sources_manifest, int quota,
                           uint64_t seed, const char* out_ontology, const char* out_corpus);

seoe_status seoe_define(seoe_session* session, const char* ontology, const char* corpus,
                        const char* model, const char* out_ontology);

/* export_embeddings may be NULL. */
seoe_status seoe_group(seoe_session* session, const char* ontology, double threshold,
                       const char* embed_model, const char* out_groups,
                       const char* export_embeddings);

/* temperature applies to the propose/supplement sampling calls; repeated
 * rounds only diverge on live providers when it is above zero. */
seoe_status seoe_annotate(seoe_session* session, const char* corpus, const char* ontology,
                          int k, double tau, int rounds, double temperature,
                          const char* model, const char* embed_model,
                          const char* out_dir);

seoe_status seoe_sample(seoe_session* session, const char* rounds_dir, double p,
                        const char* out_selected);

/* groups may be NULL (mention-containment grouping only). */
seoe_status seoe_merge(seoe_session* session, const char* selected, const char* corpus,
                       const char* ontology, const char* groups, const char* model,
                       const char* out_release);

/* Emits release.p<tag>.jsonl per p value under out_dir. */
seoe_status seoe_release_all(seoe_session* session, const char* rounds_dir,
                             const char* corpus, const char* ontology, const char* groups,
                             const double* p_values, size_t p_count, const char* model,
                             const char* out_dir);

seoe_status seoe_infer(seoe_session* session, const char* release, const char* model,
                       int max_tokens, const char* out_predictions);

seoe_status seoe_evaluate(seoe_session* session, const char* release,
                          const char* predictions, const char* groups,
                          const char* judge_model, int replicates, const char* out_report);

/* Raters named in human_ids are the human reference; the rest are judged
 * replicates. */
seoe_status seoe_iaa(seoe_session* session, const char* const* label_files, size_t n_files,
                     const char* const* human_ids, size_t n_humans, const char* out_report);

seoe_status seoe_stats(seoe_session* session, const char* release, const char* out_stats);

seoe_status seoe_cost(seoe_session* session, const char* params_file,
                      const char* out_report);

/* out_complement may be NULL. */
seoe_status seoe_subset(seoe_session* session, const char* release, double fraction,
                        uint64_t seed, const char* out_subset, const char* out_complement);

seoe_status seoe_density(seoe_session* session, const char* release,
                         const char* errors_file, const char* out_curves);

/* Full construction/eval pipeline with resume; exit status reflects the
 * first failed stage. */
seoe_status seoe_pipeline(seoe_session* session, const char* config_file,
                          const char* out_dir);

/* ---- pure helpers (no session state touched on success) ----------------- */

seoe_status seoe_score_prf(size_t matched_pred, size_t predicted, size_t matched_gold,
                           size_t gold, double* precision, double* recall, double* f1);

seoe_status seoe_percent_agreement(seoe_session* session, const int* a, const int* b,
                                   size_t n, double* out);
seoe_status seoe_cohens_kappa(seoe_session* session, const int* a, const int* b, size_t n,
                              double* out);
/* *defined is 0 when a vector has zero variance (rho/p are then meaningless). */
seoe_status seoe_spearman(seoe_session* session, const int* a, const int* b, size_t n,
                          int* defined, double* rho, double* p_value);

/* Writes the normalized mention into buffer (NUL-terminated). Fails with
 * SEOE_ERR_EMPTY_MENTION or SEOE_ERR_VALIDATION when the buffer is small. */
seoe_status seoe_normalize_mention(seoe_session* session, const char* raw, char* buffer,
                                   size_t buffer_size);

#ifdef __cplusplus
}
#endif

#endif /* SEOE_H */
