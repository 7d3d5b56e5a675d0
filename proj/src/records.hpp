#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsonio.hpp"

namespace seoe {

enum class TriggerOrigin { OriginalGold, Supplementary, Predicted };

std::string to_string(TriggerOrigin origin);
TriggerOrigin origin_from_string(const std::string& name);

struct FineGrainedDefinition {
    std::string text;
    std::size_t word_count = 0;  // whitespace tokens of text
    std::string generator;       // "model/template" or "human"
};

struct EventTypeRecord {
    std::string type_id;
    std::string display_name;
    std::string source_dataset;
    std::optional<int> serial_suffix;
    std::vector<std::string> roles;
    std::optional<FineGrainedDefinition> definition;
};

struct TriggerAnnotation {
    std::string mention;
    std::string type_id;
    TriggerOrigin origin = TriggerOrigin::OriginalGold;

    bool operator==(const TriggerAnnotation&) const = default;
};

// Identity everywhere: (case-insensitive normalized mention, type_id).
struct TriggerIdentity {
    std::string mention_norm;
    std::string type_id;

    auto operator<=>(const TriggerIdentity&) const = default;
};

TriggerIdentity trigger_identity(const TriggerAnnotation& trigger);

struct DocumentRecord {
    std::string doc_id;
    std::string text;
    std::size_t token_count = 0;  // whitespace tokens of text
    std::string source_dataset;
    std::string domain;
    std::vector<TriggerAnnotation> gold_events;
};

struct PredictionRecord {
    std::string doc_id;
    std::vector<TriggerAnnotation> triggers;  // origin = Predicted
    std::map<std::string, std::string> generated_definitions;
    std::string raw_model_output;
    bool parse_failed = false;
};

struct BenchmarkRelease {
    std::vector<DocumentRecord> documents;
    std::vector<EventTypeRecord> ontology;
    double nucleus_p = 1.0;
    int rounds = 1;
    std::map<std::string, std::string> build_manifest;
};

// Index from type_id to ontology position.
class OntologyIndex {
public:
    OntologyIndex() = default;
    explicit OntologyIndex(std::span<const EventTypeRecord> types);

    bool contains(const std::string& type_id) const;
    // Throws ValidationError for unknown ids.
    const EventTypeRecord& at(const std::string& type_id) const;
    std::size_t position(const std::string& type_id) const;
    std::size_t size() const { return types_.size(); }
    std::span<const EventTypeRecord> types() const { return types_; }

private:
    std::vector<EventTypeRecord> types_;
    std::map<std::string, std::size_t> by_id_;
};

json to_json(const FineGrainedDefinition& def);
json to_json(const EventTypeRecord& type);
json to_json(const TriggerAnnotation& trigger);
json to_json(const DocumentRecord& doc);
json to_json(const PredictionRecord& pred);

FineGrainedDefinition definition_from_json(const json& j);
EventTypeRecord event_type_from_json(const json& j);
TriggerAnnotation trigger_from_json(const json& j);
DocumentRecord document_from_json(const json& j);
PredictionRecord prediction_from_json(const json& j);

void validate_document(const DocumentRecord& doc);
void validate_ontology(std::span<const EventTypeRecord> types);
void validate_release(const BenchmarkRelease& release);

// JSONL corpus, one DocumentRecord per line. token_count is recomputed and,
// when present in the file, must agree.
std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, std::span<const DocumentRecord> docs);

// JSON array of EventTypeRecord.
std::vector<EventTypeRecord> load_ontology(const std::filesystem::path& path);
void save_ontology(const std::filesystem::path& path, std::span<const EventTypeRecord> types);

// Release file: a JSONL header line {"seoe_release":1, nucleus_p, rounds,
// build_manifest, ontology} followed by one DocumentRecord per line.
BenchmarkRelease load_release(const std::filesystem::path& path);
void save_release(const std::filesystem::path& path, const BenchmarkRelease& release);

// JSONL, one PredictionRecord per line.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> preds);

}  // namespace seoe
