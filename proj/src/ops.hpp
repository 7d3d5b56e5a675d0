#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annotator.hpp"
#include "gateway.hpp"
#include "groups.hpp"
#include "jsonio.hpp"

// File-to-file stage operations behind the CLI, the C API, and the pipeline
// runner. Outputs are written atomically in canonical JSON.
namespace seoe::ops {

struct SessionOptions {
    std::optional<std::filesystem::path> mock_script;
    std::optional<std::filesystem::path> cache_dir;
    std::string chat_base_url;   // empty: SEOE_BASE_URL
    std::string embed_base_url;  // empty: SEOE_EMBED_BASE_URL
    std::string api_key;         // empty: SEOE_API_KEY
    int max_concurrency = 8;
    int max_attempts = 3;
    int initial_backoff_ms = 1000;
};

// Env-backed gateway; default_cache_dir applies when the session sets none.
ProviderGateway make_gateway(const SessionOptions& session,
                             const std::filesystem::path& default_cache_dir);

// "0.5" -> "p05", "0.25" -> "p025", "1" -> "p1"
std::string p_tag(double p);

// Model name made path-safe for output file names.
std::string sanitize_model_name(const std::string& model);

void integrate_to_files(const std::filesystem::path& sources_manifest, int quota,
                        std::uint64_t seed, const std::filesystem::path& out_ontology,
                        const std::filesystem::path& out_corpus);

void define_to_file(const std::filesystem::path& ontology_path,
                    const std::filesystem::path& corpus_path, const std::string& model,
                    ProviderGateway& gateway, const std::filesystem::path& out_ontology);

void group_to_file(const std::filesystem::path& ontology_path, double threshold,
                   const std::string& embed_model, ProviderGateway& gateway,
                   const std::filesystem::path& out_groups,
                   const std::optional<std::filesystem::path>& export_embeddings);

void annotate_to_dir(const std::filesystem::path& corpus_path,
                     const std::filesystem::path& ontology_path, int k, double tau,
                     int rounds, double temperature, const std::string& model,
                     const std::string& embed_model, ProviderGateway& gateway,
                     const std::filesystem::path& out_dir);

std::vector<AnnotationRound> load_rounds_dir(const std::filesystem::path& rounds_dir);

void sample_to_file(const std::filesystem::path& rounds_dir, double p,
                    const std::filesystem::path& out_selected);

void merge_to_file(const std::filesystem::path& selected_path,
                   const std::filesystem::path& corpus_path,
                   const std::filesystem::path& ontology_path,
                   const std::optional<std::filesystem::path>& groups_path,
                   const std::string& model, ProviderGateway& gateway,
                   const std::filesystem::path& out_release,
                   std::map<std::string, std::string> manifest_extras = {});

// One release file per p under out_dir; returns the file names.
std::vector<std::string> release_all(const std::filesystem::path& rounds_dir,
                                     const std::filesystem::path& corpus_path,
                                     const std::filesystem::path& ontology_path,
                                     const std::optional<std::filesystem::path>& groups_path,
                                     const std::vector<double>& p_values,
                                     const std::string& model, ProviderGateway& gateway,
                                     const std::filesystem::path& out_dir,
                                     const std::map<std::string, std::string>& manifest_extras = {});

// Writes predictions plus a "<out>.summary.json" with stats and failures.
void infer_to_file(const std::filesystem::path& release_path, const std::string& model,
                   int max_tokens, ProviderGateway& gateway,
                   const std::filesystem::path& out_predictions);

// Judge replicates + scores; the returned JSON is also written to out_report.
json evaluate_to_file(const std::filesystem::path& release_path,
                      const std::filesystem::path& predictions_path,
                      const std::optional<std::filesystem::path>& groups_path,
                      const std::string& judge_model, int replicates,
                      ProviderGateway& gateway, const std::filesystem::path& out_report);

// In-memory core of evaluate (used by tests and subset recombination).
json evaluate_release(const BenchmarkRelease& release,
                      std::span<const PredictionRecord> predictions,
                      const GroupSet& groups, const std::string& judge_model,
                      int replicates, ProviderGateway& gateway);

void stats_to_file(const std::filesystem::path& release_path,
                   const std::filesystem::path& out_stats);

void cost_to_file(const std::filesystem::path& params_path,
                  const std::filesystem::path& out_report);

void subset_to_files(const std::filesystem::path& release_path, double fraction,
                     std::uint64_t seed, const std::filesystem::path& out_subset,
                     const std::optional<std::filesystem::path>& out_complement);

void density_to_file(const std::filesystem::path& release_path,
                     const std::filesystem::path& errors_path,
                     const std::filesystem::path& out_curves);

void iaa_to_file(const std::vector<std::filesystem::path>& label_files,
                 const std::vector<std::string>& human_ids,
                 const std::filesystem::path& out_report);

}  // namespace seoe::ops
