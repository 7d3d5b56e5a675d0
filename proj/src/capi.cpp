#include "seoe/seoe.h"

#include <cstring>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "log.hpp"
#include "ops.hpp"
#include "pipeline.hpp"
#include "text.hpp"

using seoe::ops::SessionOptions;

struct seoe_session {
    SessionOptions options;
    std::string last_error;
};

namespace {

seoe_status store_error(seoe_session* session, seoe_status status, const char* what) {
    if (session) session->last_error = what ? what : "unknown error";
    return status;
}

template <typename Fn>
seoe_status guard(seoe_session* session, Fn&& fn) {
    if (!session) return SEOE_ERR_VALIDATION;
    session->last_error.clear();
    try {
        fn();
        return SEOE_OK;
    } catch (const seoe::Error& e) {
        return store_error(session, static_cast<seoe_status>(e.code()), e.what());
    } catch (const std::exception& e) {
        return store_error(session, SEOE_ERR_INTERNAL, e.what());
    } catch (...) {
        return store_error(session, SEOE_ERR_INTERNAL, "unknown error");
    }
}

std::string required(const char* value, const char* name) {
    if (!value || !*value) {
        throw seoe::ValidationError(std::string(name) + " must be non-empty");
    }
    return value;
}

seoe::ProviderGateway stage_gateway(const seoe_session* session) {
    return seoe::ops::make_gateway(session->options, "seoe_cache");
}

}  // namespace

extern "C" {

seoe_session* seoe_session_new(void) { return new (std::nothrow) seoe_session(); }

void seoe_session_free(seoe_session* session) { delete session; }

const char* seoe_session_last_error(const seoe_session* session) {
    return session ? session->last_error.c_str() : "null session";
}

seoe_status seoe_session_set_mock_script(seoe_session* session, const char* path) {
    return guard(session, [&] {
        session->options.mock_script = required(path, "mock script path");
    });
}

seoe_status seoe_session_set_cache_dir(seoe_session* session, const char* path) {
    return guard(session, [&] {
        session->options.cache_dir = required(path, "cache dir");
    });
}

seoe_status seoe_session_set_provider(seoe_session* session, const char* chat_base_url,
                                      const char* embed_base_url, const char* api_key) {
    return guard(session, [&] {
        if (chat_base_url) session->options.chat_base_url = chat_base_url;
        if (embed_base_url) session->options.embed_base_url = embed_base_url;
        if (api_key) session->options.api_key = api_key;
    });
}

seoe_status seoe_session_set_max_concurrency(seoe_session* session, int max_concurrency) {
    return guard(session, [&] {
        if (max_concurrency < 1) {
            throw seoe::ValidationError("max_concurrency must be >= 1");
        }
        session->options.max_concurrency = max_concurrency;
    });
}

seoe_status seoe_session_set_retry(seoe_session* session, int max_attempts,
                                   int initial_backoff_ms) {
    return guard(session, [&] {
        if (max_attempts < 1) throw seoe::ValidationError("max_attempts must be >= 1");
        if (initial_backoff_ms < 0) {
            throw seoe::ValidationError("initial_backoff_ms must be >= 0");
        }
        session->options.max_attempts = max_attempts;
        session->options.initial_backoff_ms = initial_backoff_ms;
    });
}

seoe_status seoe_session_set_log_level(seoe_session* session, const char* level) {
    return guard(session, [&] {
        seoe::log::set_level(seoe::log::level_from_string(required(level, "log level")));
    });
}

seoe_status seoe_integrate(seoe_session* session, const char* sources_manifest, int quota,
                           uint64_t seed, const char* out_ontology, const char* out_corpus) {
    return guard(session, [&] {
        seoe::ops::integrate_to_files(required(sources_manifest, "sources manifest"), quota,
                                      seed, required(out_ontology, "out ontology"),
                                      required(out_corpus, "out corpus"));
    });
}

seoe_status seoe_define(seoe_session* session, const char* ontology, const char* corpus,
                        const char* model, const char* out_ontology) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        seoe::ops::define_to_file(required(ontology, "ontology"), required(corpus, "corpus"),
                                  required(model, "model"), gateway,
                                  required(out_ontology, "out ontology"));
    });
}

seoe_status seoe_group(seoe_session* session, const char* ontology, double threshold,
                       const char* embed_model, const char* out_groups,
                       const char* export_embeddings) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        std::optional<std::filesystem::path> export_path;
        if (export_embeddings && *export_embeddings) export_path = export_embeddings;
        seoe::ops::group_to_file(required(ontology, "ontology"), threshold,
                                 required(embed_model, "embed model"), gateway,
                                 required(out_groups, "out groups"), export_path);
    });
}

seoe_status seoe_annotate(seoe_session* session, const char* corpus, const char* ontology,
                          int k, double tau, int rounds, double temperature,
                          const char* model, const char* embed_model,
                          const char* out_dir) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        seoe::ops::annotate_to_dir(required(corpus, "corpus"), required(ontology, "ontology"),
                                   k, tau, rounds, temperature, required(model, "model"),
                                   required(embed_model, "embed model"), gateway,
                                   required(out_dir, "out dir"));
    });
}

seoe_status seoe_sample(seoe_session* session, const char* rounds_dir, double p,
                        const char* out_selected) {
    return guard(session, [&] {
        seoe::ops::sample_to_file(required(rounds_dir, "rounds dir"), p,
                                  required(out_selected, "out selected"));
    });
}

seoe_status seoe_merge(seoe_session* session, const char* selected, const char* corpus,
                       const char* ontology, const char* groups, const char* model,
                       const char* out_release) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        std::optional<std::filesystem::path> groups_path;
        if (groups && *groups) groups_path = groups;
        seoe::ops::merge_to_file(required(selected, "selected"), required(corpus, "corpus"),
                                 required(ontology, "ontology"), groups_path,
                                 required(model, "model"), gateway,
                                 required(out_release, "out release"));
    });
}

seoe_status seoe_release_all(seoe_session* session, const char* rounds_dir,
                             const char* corpus, const char* ontology, const char* groups,
                             const double* p_values, size_t p_count, const char* model,
                             const char* out_dir) {
    return guard(session, [&] {
        if (!p_values || p_count == 0) {
            throw seoe::ValidationError("at least one p value is required");
        }
        auto gateway = stage_gateway(session);
        std::optional<std::filesystem::path> groups_path;
        if (groups && *groups) groups_path = groups;
        seoe::ops::release_all(required(rounds_dir, "rounds dir"),
                               required(corpus, "corpus"), required(ontology, "ontology"),
                               groups_path, {p_values, p_values + p_count},
                               required(model, "model"), gateway,
                               required(out_dir, "out dir"));
    });
}

seoe_status seoe_infer(seoe_session* session, const char* release, const char* model,
                       int max_tokens, const char* out_predictions) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        seoe::ops::infer_to_file(required(release, "release"), required(model, "model"),
                                 max_tokens, gateway,
                                 required(out_predictions, "out predictions"));
    });
}

seoe_status seoe_evaluate(seoe_session* session, const char* release,
                          const char* predictions, const char* groups,
                          const char* judge_model, int replicates, const char* out_report) {
    return guard(session, [&] {
        auto gateway = stage_gateway(session);
        std::optional<std::filesystem::path> groups_path;
        if (groups && *groups) groups_path = groups;
        seoe::ops::evaluate_to_file(required(release, "release"),
                                    required(predictions, "predictions"), groups_path,
                                    required(judge_model, "judge model"), replicates,
                                    gateway, required(out_report, "out report"));
    });
}

seoe_status seoe_iaa(seoe_session* session, const char* const* label_files, size_t n_files,
                     const char* const* human_ids, size_t n_humans, const char* out_report) {
    return guard(session, [&] {
        if (!label_files || n_files == 0) {
            throw seoe::ValidationError("at least one labels file is required");
        }
        std::vector<std::filesystem::path> files;
        for (size_t i = 0; i < n_files; ++i) {
            files.emplace_back(required(label_files[i], "labels file"));
        }
        std::vector<std::string> humans;
        for (size_t i = 0; i < n_humans; ++i) {
            humans.emplace_back(required(human_ids[i], "human id"));
        }
        seoe::ops::iaa_to_file(files, humans, required(out_report, "out report"));
    });
}

seoe_status seoe_stats(seoe_session* session, const char* release, const char* out_stats) {
    return guard(session, [&] {
        seoe::ops::stats_to_file(required(release, "release"),
                                 required(out_stats, "out stats"));
    });
}

seoe_status seoe_cost(seoe_session* session, const char* params_file,
                      const char* out_report) {
    return guard(session, [&] {
        seoe::ops::cost_to_file(required(params_file, "params file"),
                                required(out_report, "out report"));
    });
}

seoe_status seoe_subset(seoe_session* session, const char* release, double fraction,
                        uint64_t seed, const char* out_subset, const char* out_complement) {
    return guard(session, [&] {
        std::optional<std::filesystem::path> complement;
        if (out_complement && *out_complement) complement = out_complement;
        seoe::ops::subset_to_files(required(release, "release"), fraction, seed,
                                   required(out_subset, "out subset"), complement);
    });
}

seoe_status seoe_density(seoe_session* session, const char* release,
                         const char* errors_file, const char* out_curves) {
    return guard(session, [&] {
        seoe::ops::density_to_file(required(release, "release"),
                                   required(errors_file, "errors file"),
                                   required(out_curves, "out curves"));
    });
}

seoe_status seoe_pipeline(seoe_session* session, const char* config_file,
                          const char* out_dir) {
    return guard(session, [&] {
        auto config = seoe::load_pipeline_config(required(config_file, "config file"));
        auto manifest =
            seoe::run_pipeline(config, session->options, required(out_dir, "out dir"));
        if (!manifest.ok) {
            for (const auto& stage : manifest.stages) {
                if (stage.status == "failed") {
                    throw seoe::Error(seoe::ErrorCode::Internal,
                                      "stage " + stage.name + " failed: " + stage.error);
                }
            }
            throw seoe::Error(seoe::ErrorCode::Internal, "pipeline failed");
        }
    });
}

seoe_status seoe_score_prf(size_t matched_pred, size_t predicted, size_t matched_gold,
                           size_t gold, double* precision, double* recall, double* f1) {
    if (!precision || !recall || !f1) return SEOE_ERR_VALIDATION;
    if (matched_pred > predicted || matched_gold > gold) return SEOE_ERR_VALIDATION;
    std::tie(*precision, *recall, *f1) =
        seoe::score_prf(matched_pred, predicted, matched_gold, gold);
    return SEOE_OK;
}

namespace {

seoe::JudgmentVector make_vector(const int* values, size_t n, const char* name) {
    if (!values) throw seoe::ValidationError(std::string(name) + " must be non-null");
    seoe::JudgmentVector vec;
    vec.rater_id = name;
    vec.labels.assign(values, values + n);
    return vec;
}

}  // namespace

seoe_status seoe_percent_agreement(seoe_session* session, const int* a, const int* b,
                                   size_t n, double* out) {
    return guard(session, [&] {
        if (!out) throw seoe::ValidationError("out must be non-null");
        *out = seoe::percent_agreement(make_vector(a, n, "a"), make_vector(b, n, "b"));
    });
}

seoe_status seoe_cohens_kappa(seoe_session* session, const int* a, const int* b, size_t n,
                              double* out) {
    return guard(session, [&] {
        if (!out) throw seoe::ValidationError("out must be non-null");
        *out = seoe::cohens_kappa(make_vector(a, n, "a"), make_vector(b, n, "b"));
    });
}

seoe_status seoe_spearman(seoe_session* session, const int* a, const int* b, size_t n,
                          int* defined, double* rho, double* p_value) {
    return guard(session, [&] {
        if (!defined || !rho || !p_value) {
            throw seoe::ValidationError("out parameters must be non-null");
        }
        auto result = seoe::spearman(make_vector(a, n, "a"), make_vector(b, n, "b"));
        *defined = result.defined ? 1 : 0;
        *rho = result.rho;
        *p_value = result.p_value;
    });
}

seoe_status seoe_normalize_mention(seoe_session* session, const char* raw, char* buffer,
                                   size_t buffer_size) {
    return guard(session, [&] {
        if (!raw || !buffer) throw seoe::ValidationError("raw and buffer must be non-null");
        std::string normalized = seoe::normalize_mention(raw);
        if (normalized.size() + 1 > buffer_size) {
            throw seoe::ValidationError("buffer too small (" +
                                        std::to_string(normalized.size() + 1) +
                                        " bytes needed)");
        }
        std::memcpy(buffer, normalized.c_str(), normalized.size() + 1);
    });
}

}  // extern "C"
