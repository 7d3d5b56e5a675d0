#include "inference.hpp"

#include <set>

#include "errors.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace seoe {

std::vector<PredictionRecord> run_inference(const BenchmarkRelease& release,
                                            const InferenceOptions& options,
                                            ProviderGateway& gateway,
                                            std::vector<InferenceFailure>* failures) {
    std::vector<PredictionRecord> predictions(release.documents.size());
    std::vector<InferenceFailure> collected;
    std::mutex failures_mutex;

    parallel_for(release.documents.size(), gateway.max_concurrency(), [&](std::size_t i) {
        const DocumentRecord& doc = release.documents[i];
        PredictionRecord& record = predictions[i];
        record.doc_id = doc.doc_id;

        ChatRequest request;
        request.model = options.model;
        request.temperature = 0.0;  // deterministic decoding for evaluated models
        request.max_tokens = options.max_tokens;
        const std::string prompt = prompts::render_inference_prompt(doc.text);
        request.messages = {{"user", prompt}};

        prompts::InferenceReply reply;
        std::string failure;
        bool parsed = false;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            if (attempt == 0) {
                request.template_version = prompts::kInferVersion;
            } else {
                request.template_version = std::string(prompts::kInferVersion) + "/retry";
                request.messages = {{"user", prompt +
                                                 "\n\nReminder: reply with exactly one JSON "
                                                 "object in the requested format."}};
            }
            std::string raw;
            try {
                raw = gateway.chat(request);
                record.raw_model_output = raw;
                reply = prompts::parse_inference_reply(raw);
                parsed = true;
            } catch (const ParseError& e) {
                failure = e.what();
            }
        }
        if (!parsed) {
            record.parse_failed = true;
            std::lock_guard<std::mutex> lock(failures_mutex);
            collected.push_back({doc.doc_id, failure});
            return;
        }

        const std::string text_norm = normalize_text(doc.text);
        std::set<TriggerIdentity> seen;
        for (const auto& [span, type_name] : reply.extractions) {
            if (!reply.definitions.count(type_name)) {
                log::warn("doc ", doc.doc_id, ": extraction references undeclared type \"",
                          type_name, "\", dropped");
                continue;
            }
            std::string span_norm;
            try {
                span_norm = normalize_mention(span);
            } catch (const EmptyMentionError&) {
                log::warn("doc ", doc.doc_id, ": empty extraction span dropped");
                continue;
            }
            if (text_norm.find(span_norm) == std::string::npos) {
                log::warn("doc ", doc.doc_id, ": extraction span \"", span,
                          "\" not found in text, dropped");
                continue;
            }
            TriggerAnnotation trigger{span, type_name, TriggerOrigin::Predicted};
            if (!seen.insert(trigger_identity(trigger)).second) continue;
            record.triggers.push_back(std::move(trigger));
        }
        // Keep only definitions for retained trigger types.
        for (const auto& t : record.triggers) {
            record.generated_definitions[t.type_id] = reply.definitions.at(t.type_id);
        }
    });

    if (failures) *failures = std::move(collected);
    return predictions;
}

PredictionStats prediction_stats(std::span<const PredictionRecord> predictions) {
    PredictionStats stats;
    stats.documents = predictions.size();
    if (predictions.empty()) return stats;

    std::size_t triggers = 0;
    std::size_t failed = 0;
    std::size_t definition_words = 0;
    std::size_t definitions = 0;
    for (const auto& p : predictions) {
        triggers += p.triggers.size();
        if (p.parse_failed) ++failed;
        for (const auto& [_, text] : p.generated_definitions) {
            definition_words += whitespace_token_count(text);
            ++definitions;
        }
    }
    stats.mean_triggers_per_doc =
        static_cast<double>(triggers) / static_cast<double>(predictions.size());
    stats.parse_failure_rate =
        static_cast<double>(failed) / static_cast<double>(predictions.size());
    stats.mean_definition_word_count =
        definitions ? static_cast<double>(definition_words) / static_cast<double>(definitions)
                    : 0.0;
    return stats;
}

json to_json(const PredictionStats& stats) {
    return json{{"documents", stats.documents},
                {"mean_triggers_per_doc", stats.mean_triggers_per_doc},
                {"parse_failure_rate", stats.parse_failure_rate},
                {"mean_definition_word_count", stats.mean_definition_word_count}};
}

}  // namespace seoe
