#include "evaluator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "errors.hpp"
#include "log.hpp"
#include "prompts.hpp"

namespace seoe {

JudgeVerdict judge_document(const DocumentRecord& doc, const PredictionRecord& prediction,
                            const OntologyIndex& ontology, const GroupSet& groups,
                            ProviderGateway& gateway, const JudgeConfig& config) {
    JudgeVerdict verdict;
    verdict.doc_id = doc.doc_id;
    verdict.judge_model = config.model;
    verdict.replicate = config.replicate;

    // Nothing to pair up: no call needed.
    if (prediction.triggers.empty() || doc.gold_events.empty()) return verdict;

    std::vector<prompts::TriggerView> gold;
    for (const auto& t : doc.gold_events) gold.push_back({t.mention, t.type_id});
    std::vector<prompts::TriggerView> predicted;
    for (const auto& t : prediction.triggers) predicted.push_back({t.mention, t.type_id});

    std::vector<prompts::NamedDefinition> definitions;
    std::set<std::string> seen_names;
    for (const auto& t : doc.gold_events) {
        if (!seen_names.insert(t.type_id).second) continue;
        const auto& type = ontology.at(t.type_id);
        definitions.push_back(
            {t.type_id, type.definition ? type.definition->text : std::string()});
    }
    for (const auto& t : prediction.triggers) {
        if (!seen_names.insert(t.type_id).second) continue;
        auto it = prediction.generated_definitions.find(t.type_id);
        definitions.push_back(
            {t.type_id, it != prediction.generated_definitions.end() ? it->second
                                                                     : std::string()});
    }

    // Co-group definitions for each distinct gold type.
    std::vector<prompts::NamedDefinition> similar;
    std::set<std::string> seen_similar;
    std::set<std::string> gold_types;
    for (const auto& t : doc.gold_events) gold_types.insert(t.type_id);
    for (const auto& type_id : gold_types) {
        if (!groups.index.count(type_id)) continue;
        for (const auto& [member, definition] : group_context(type_id, groups, ontology.types())) {
            if (gold_types.count(member) || !seen_similar.insert(member).second) continue;
            similar.push_back({member, definition});
        }
    }

    ChatRequest request;
    request.model = config.model;
    request.temperature = 0.0;
    request.messages = {{"user", prompts::render_judge_prompt(doc.text, gold, predicted,
                                                              definitions, similar)}};

    std::vector<std::pair<int, int>> pairs;
    std::string failure;
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        request.template_version = std::string(prompts::kJudgeVersion) + "/rep" +
                                   std::to_string(config.replicate) +
                                   (attempt ? "/retry" : "");
        try {
            verdict.raw_reply = gateway.chat(request);
            pairs = prompts::parse_judge_reply(verdict.raw_reply);
            parsed = true;
        } catch (const ParseError& e) {
            failure = e.what();
        }
    }
    if (!parsed) {
        verdict.failed = true;
        log::warn("doc ", doc.doc_id, ": judge reply unparseable, counted as zero matches (",
                  failure, ")");
        return verdict;
    }

    std::set<std::pair<int, int>> dedup;
    for (const auto& [pred_index, gold_index] : pairs) {
        if (pred_index < 0 || static_cast<std::size_t>(pred_index) >= predicted.size() ||
            gold_index < 0 || static_cast<std::size_t>(gold_index) >= gold.size()) {
            log::warn("doc ", doc.doc_id, ": judge pair (pred ", pred_index, ", gold ",
                      gold_index, ") out of range, dropped");
            continue;
        }
        if (dedup.emplace(pred_index, gold_index).second) {
            verdict.pairs.emplace_back(pred_index, gold_index);
        }
    }
    return verdict;
}

std::tuple<double, double, double> score_prf(std::size_t matched_pred, std::size_t predicted,
                                             std::size_t matched_gold, std::size_t gold) {
    double precision = predicted == 0
                           ? 1.0
                           : static_cast<double>(matched_pred) / static_cast<double>(predicted);
    double recall = gold == 0
                        ? 1.0
                        : static_cast<double>(matched_gold) / static_cast<double>(gold);
    double f1 = precision + recall == 0.0
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    return {precision, recall, f1};
}

DocScore score_document(const JudgeVerdict& verdict, std::size_t predicted, std::size_t gold) {
    std::set<int> matched_pred;
    std::set<int> matched_gold;
    for (const auto& [pred_index, gold_index] : verdict.pairs) {
        if (pred_index < 0 || static_cast<std::size_t>(pred_index) >= predicted ||
            gold_index < 0 || static_cast<std::size_t>(gold_index) >= gold) {
            throw ValidationError("verdict pair out of range for doc " + verdict.doc_id);
        }
        matched_pred.insert(pred_index);
        matched_gold.insert(gold_index);
    }
    DocScore score;
    score.doc_id = verdict.doc_id;
    score.predicted = predicted;
    score.gold = gold;
    score.matched_pred = matched_pred.size();
    score.matched_gold = matched_gold.size();
    std::tie(score.precision, score.recall, score.f1) =
        score_prf(score.matched_pred, predicted, score.matched_gold, gold);
    return score;
}

MatchReport score_corpus(std::span<const JudgeVerdict> verdicts,
                         std::span<const PredictionRecord> predictions,
                         const BenchmarkRelease& release) {
    std::map<std::string, const PredictionRecord*> preds_by_id;
    for (const auto& p : predictions) preds_by_id[p.doc_id] = &p;
    std::map<std::string, const JudgeVerdict*> verdicts_by_id;
    for (const auto& v : verdicts) verdicts_by_id[v.doc_id] = &v;

    MatchReport report;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    for (const auto& doc : release.documents) {
        auto pred_it = preds_by_id.find(doc.doc_id);
        if (pred_it == preds_by_id.end()) {
            throw ValidationError("no prediction for doc " + doc.doc_id);
        }
        auto verdict_it = verdicts_by_id.find(doc.doc_id);
        if (verdict_it == verdicts_by_id.end()) {
            throw ValidationError("no verdict for doc " + doc.doc_id);
        }
        const JudgeVerdict& verdict = *verdict_it->second;
        DocScore score = score_document(verdict, pred_it->second->triggers.size(),
                                        doc.gold_events.size());
        if (verdict.failed) report.failed_docs.push_back(doc.doc_id);
        report.total_predicted += score.predicted;
        report.total_gold += score.gold;
        report.total_matched_pred += score.matched_pred;
        report.total_matched_gold += score.matched_gold;
        macro_p += score.precision;
        macro_r += score.recall;
        macro_f1 += score.f1;
        report.per_doc.push_back(std::move(score));
    }

    std::tie(report.micro_precision, report.micro_recall, report.micro_f1) =
        score_prf(report.total_matched_pred, report.total_predicted,
                  report.total_matched_gold, report.total_gold);
    if (!report.per_doc.empty()) {
        report.macro_precision = macro_p / static_cast<double>(report.per_doc.size());
        report.macro_recall = macro_r / static_cast<double>(report.per_doc.size());
        report.macro_f1 = macro_f1 / static_cast<double>(report.per_doc.size());
    }
    return report;
}

json to_json(const MatchReport& report) {
    json per_doc = json::array();
    for (const auto& score : report.per_doc) {
        per_doc.push_back(json{{"doc_id", score.doc_id},
                               {"predicted", score.predicted},
                               {"gold", score.gold},
                               {"matched_pred", score.matched_pred},
                               {"matched_gold", score.matched_gold},
                               {"precision", score.precision},
                               {"recall", score.recall},
                               {"f1", score.f1}});
    }
    return json{{"per_doc", std::move(per_doc)},
                {"totals", json{{"predicted", report.total_predicted},
                                {"gold", report.total_gold},
                                {"matched_pred", report.total_matched_pred},
                                {"matched_gold", report.total_matched_gold}}},
                {"micro", json{{"precision", report.micro_precision},
                               {"recall", report.micro_recall},
                               {"f1", report.micro_f1}}},
                {"macro", json{{"precision", report.macro_precision},
                               {"recall", report.macro_recall},
                               {"f1", report.macro_f1}}},
                {"failed_docs", report.failed_docs}};
}

}  // namespace seoe
