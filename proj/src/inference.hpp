#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gateway.hpp"
#include "records.hpp"

namespace seoe {

struct InferenceOptions {
    std::string model;
    int max_tokens = 2048;
};

struct InferenceFailure {
    std::string doc_id;
    std::string reason;
};

// Open-domain inference over the release: the prompt carries the document
// text only, never ontology names, definitions, or groups. Extractions whose
// event type is not declared in the reply's generated definitions, or whose
// mention does not occur in the text, are dropped with a warning. Documents
// whose reply cannot be parsed after one retry get a flagged empty record.
std::vector<PredictionRecord> run_inference(const BenchmarkRelease& release,
                                            const InferenceOptions& options,
                                            ProviderGateway& gateway,
                                            std::vector<InferenceFailure>* failures = nullptr);

struct PredictionStats {
    std::size_t documents = 0;
    double mean_triggers_per_doc = 0.0;
    double parse_failure_rate = 0.0;
    double mean_definition_word_count = 0.0;
};

PredictionStats prediction_stats(std::span<const PredictionRecord> predictions);

json to_json(const PredictionStats& stats);

}  // namespace seoe
