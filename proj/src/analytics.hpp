#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "records.hpp"

namespace seoe {

// ---------------------------------------------------------------------------
// Inter-annotator agreement

struct JudgmentVector {
    std::string rater_id;
    std::vector<int> labels;  // one per aligned (prediction, gold) candidate pair
};

double percent_agreement(const JudgmentVector& a, const JudgmentVector& b);

// (p_o - p_e) / (1 - p_e) with marginal-product expected agreement. When
// p_e = 1 the value is 1 for identical vectors, else 0.
double cohens_kappa(const JudgmentVector& a, const JudgmentVector& b);

struct SpearmanResult {
    bool defined = false;  // false when either vector has zero variance
    double rho = 0.0;
    double p_value = 1.0;  // exact permutation for n <= 10, t-approximation above
};

SpearmanResult spearman(const JudgmentVector& a, const JudgmentVector& b);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample std over replicates (0 for a single one)
    bool defined = true;
};

struct IaaPanel {
    std::size_t replicates = 0;
    std::size_t humans = 0;
    std::size_t pairs = 0;
    // Per replicate: mean over humans.
    std::vector<double> percent_per_replicate;
    std::vector<double> kappa_per_replicate;
    std::vector<std::optional<double>> spearman_per_replicate;
    MetricSummary percent;
    MetricSummary kappa;
    MetricSummary spearman_rho;
    // Human-only pairwise means, the reference row.
    double human_percent = 0.0;
    double human_kappa = 0.0;
    std::optional<double> human_spearman;
};

// IAA between the judged replicates and each human is computed first, then
// averaged; mean +- std is reported over replicates.
IaaPanel iaa_panel(std::span<const JudgmentVector> llm_replicates,
                   std::span<const JudgmentVector> humans);

json to_json(const IaaPanel& panel);

// Labels file: {"rater_id", "pairs": [{"doc_id", "pred_index", "gold_index",
// "match": 0|1}]}. All raters must label the same pair set; vectors are
// aligned on (doc_id, pred_index, gold_index) order.
std::vector<JudgmentVector> load_judgment_vectors(
    const std::vector<std::filesystem::path>& label_files);

// ---------------------------------------------------------------------------
// Benchmark statistics

struct BenchmarkStats {
    std::size_t documents = 0;
    std::size_t sentences = 0;
    std::size_t tokens = 0;
    std::size_t event_types = 0;
    std::size_t events = 0;
    double avg_definition_length = 0.0;
    double avg_trigger_length = 0.0;
    double avg_events_per_doc = 0.0;
    double type_avg_frequency = 0.0;
    // Share of events owned by types ranked top/bottom x% by frequency.
    double top10_share = 0.0;
    double top25_share = 0.0;
    double bottom50_share = 0.0;
    double bottom25_share = 0.0;
    double bottom10_share = 0.0;
};

BenchmarkStats benchmark_stats(const BenchmarkRelease& release);
json to_json(const BenchmarkStats& stats);

// ---------------------------------------------------------------------------
// Error patterns and event-density curves

enum class ErrorPattern {
    AmbiguousMention,
    LengthyMention,
    InconsistentTypeDefinition,
    ConflictingTypeDefinition,
    ReasonablePredictionNoMatch,
};

std::string to_string(ErrorPattern pattern);
ErrorPattern error_pattern_from_string(const std::string& name);

enum class ReliabilitySubtype { C1, C2, C3, C4, IC1, IC2, IC3 };
std::string to_string(ReliabilitySubtype subtype);
ReliabilitySubtype reliability_subtype_from_string(const std::string& name);

struct ErrorPatternLabel {
    std::string doc_id;
    int pred_index = 0;
    ErrorPattern pattern = ErrorPattern::ReasonablePredictionNoMatch;
    std::optional<ReliabilitySubtype> subtype;
};

std::vector<ErrorPatternLabel> load_error_labels(const std::filesystem::path& path);

struct DensityCutPoint {
    double fraction = 0.0;       // cumulative ranking cut (0.10 .. 1.00)
    std::size_t documents = 0;   // prefix size (ceil(fraction * N))
    std::size_t labeled_errors = 0;
    std::map<std::string, std::size_t> counts;  // pattern -> errors in prefix
    std::map<std::string, double> shares;       // pattern -> fraction of prefix errors
};

// Documents ranked by event density (gold events / tokens, descending); at
// each cut the distribution of error patterns within the prefix.
std::vector<DensityCutPoint> density_curves(const BenchmarkRelease& release,
                                            std::span<const ErrorPatternLabel> labels);

json to_json(std::span<const DensityCutPoint> curves);

// ---------------------------------------------------------------------------
// Cost model

struct CostParameters {
    double texts = 0;              // N
    double types = 0;              // T
    double new_texts = 0;          // N'
    double new_types = 0;          // T'
    double annotation_cost = 0;    // c-bar: one annotation pass of one text
    double embedding_cost = 0;     // c-bar': one embedding
    double definition_cost = 0;    // c-bar_t: one definition generation
    double avg_latent_types = 0;   // t-bar
    double avg_new_latent_types = 0;  // t-bar'
    double avg_possible_types = 0;    // p-bar
};

void validate(const CostParameters& params);
CostParameters cost_parameters_from_json(const json& j);

double naive_cost(const CostParameters& params);

struct PipelineCost {
    double exact = 0.0;
    double approx = 0.0;
};
PipelineCost pipeline_cost(const CostParameters& params);

struct IncrementalCost {
    double definitions = 0.0;  // new-type definition generation
    double new_texts = 0.0;    // annotating added texts
    double back_fill = 0.0;    // supplementing existing texts with new types
    double total = 0.0;
};
IncrementalCost incremental_cost(const CostParameters& params);

// ---------------------------------------------------------------------------
// Subset evaluation

// Uniform random document subset of round(fraction * N) documents plus its
// complement; document order is preserved, ontology unchanged.
std::pair<BenchmarkRelease, BenchmarkRelease> subset_split(const BenchmarkRelease& release,
                                                           double fraction,
                                                           std::uint64_t seed);
BenchmarkRelease subset_sample(const BenchmarkRelease& release, double fraction,
                               std::uint64_t seed);

}  // namespace seoe
