#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gateway.hpp"
#include "groups.hpp"
#include "records.hpp"

namespace seoe {

struct JudgeVerdict {
    std::string doc_id;
    std::vector<std::pair<int, int>> pairs;  // (pred_index, gold_index), deduplicated
    std::string raw_reply;
    std::string judge_model;
    int replicate = 1;
    bool failed = false;  // unparseable after retry; counts zero matches
};

struct DocScore {
    std::string doc_id;
    std::size_t predicted = 0;       // |P|
    std::size_t gold = 0;            // |G|
    std::size_t matched_pred = 0;    // |C_p|
    std::size_t matched_gold = 0;    // |C_g|
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MatchReport {
    std::vector<DocScore> per_doc;
    std::size_t total_predicted = 0;
    std::size_t total_gold = 0;
    std::size_t total_matched_pred = 0;
    std::size_t total_matched_gold = 0;
    double micro_precision = 0.0;
    double micro_recall = 0.0;
    double micro_f1 = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::string> failed_docs;
};

struct JudgeConfig {
    std::string model;
    int replicate = 1;
};

// Renders the judging prompt (text, indexed gold and predicted triggers with
// definitions, plus co-group definitions of each gold type) and parses the
// matched index pairs. Out-of-range pairs are dropped; pairs are deduplicated.
// Either side empty short-circuits without a call.
JudgeVerdict judge_document(const DocumentRecord& doc, const PredictionRecord& prediction,
                            const OntologyIndex& ontology, const GroupSet& groups,
                            ProviderGateway& gateway, const JudgeConfig& config);

// p = |C_p|/|P|, r = |C_g|/|G|, f1 = 2pr/(p+r); empty sides score 1,
// p + r = 0 scores f1 = 0.
std::tuple<double, double, double> score_prf(std::size_t matched_pred, std::size_t predicted,
                                             std::size_t matched_gold, std::size_t gold);

DocScore score_document(const JudgeVerdict& verdict, std::size_t predicted, std::size_t gold);

// Micro aggregation (summed counts) as the primary corpus score; macro
// averages reported alongside. One verdict per document is required.
MatchReport score_corpus(std::span<const JudgeVerdict> verdicts,
                         std::span<const PredictionRecord> predictions,
                         const BenchmarkRelease& release);

json to_json(const MatchReport& report);

}  // namespace seoe
