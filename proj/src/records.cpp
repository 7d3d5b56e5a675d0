#include "records.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "text.hpp"

namespace seoe {

std::string to_string(TriggerOrigin origin) {
    switch (origin) {
        case TriggerOrigin::OriginalGold: return "original_gold";
        case TriggerOrigin::Supplementary: return "supplementary";
        case TriggerOrigin::Predicted: return "predicted";
    }
    throw ValidationError("invalid trigger origin");
}

TriggerOrigin origin_from_string(const std::string& name) {
    if (name == "original_gold") return TriggerOrigin::OriginalGold;
    if (name == "supplementary") return TriggerOrigin::Supplementary;
    if (name == "predicted") return TriggerOrigin::Predicted;
    throw ValidationError("unknown trigger origin: " + name);
}

TriggerIdentity trigger_identity(const TriggerAnnotation& trigger) {
    return TriggerIdentity{normalize_mention(trigger.mention), trigger.type_id};
}

OntologyIndex::OntologyIndex(std::span<const EventTypeRecord> types)
    : types_(types.begin(), types.end()) {
    for (std::size_t i = 0; i < types_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(types_[i].type_id, i);
        if (!inserted) {
            throw ValidationError("duplicate type_id in ontology: " + types_[i].type_id);
        }
    }
}

bool OntologyIndex::contains(const std::string& type_id) const {
    return by_id_.count(type_id) > 0;
}

const EventTypeRecord& OntologyIndex::at(const std::string& type_id) const {
    return types_[position(type_id)];
}

std::size_t OntologyIndex::position(const std::string& type_id) const {
    auto it = by_id_.find(type_id);
    if (it == by_id_.end()) {
        throw ValidationError("unknown type_id: " + type_id);
    }
    return it->second;
}

json to_json(const FineGrainedDefinition& def) {
    return json{{"text", def.text},
                {"word_count", def.word_count},
                {"generator", def.generator}};
}

json to_json(const EventTypeRecord& type) {
    json j{{"type_id", type.type_id},
           {"display_name", type.display_name},
           {"source_dataset", type.source_dataset},
           {"roles", type.roles}};
    if (type.serial_suffix) j["serial_suffix"] = *type.serial_suffix;
    j["definition"] = type.definition ? to_json(*type.definition) : json(nullptr);
    return j;
}

json to_json(const TriggerAnnotation& trigger) {
    return json{{"mention", trigger.mention},
                {"type_id", trigger.type_id},
                {"origin", to_string(trigger.origin)}};
}

json to_json(const DocumentRecord& doc) {
    json events = json::array();
    for (const auto& t : doc.gold_events) events.push_back(to_json(t));
    return json{{"doc_id", doc.doc_id},
                {"text", doc.text},
                {"token_count", doc.token_count},
                {"source_dataset", doc.source_dataset},
                {"domain", doc.domain},
                {"gold_events", std::move(events)}};
}

json to_json(const PredictionRecord& pred) {
    json triggers = json::array();
    for (const auto& t : pred.triggers) triggers.push_back(to_json(t));
    return json{{"doc_id", pred.doc_id},
                {"triggers", std::move(triggers)},
                {"generated_definitions", pred.generated_definitions},
                {"raw_model_output", pred.raw_model_output},
                {"parse_failed", pred.parse_failed}};
}

namespace {

const json& require(const json& j, const char* key, const std::string& context) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError("missing key \"" + std::string(key) + "\" in " + context);
    }
    return *it;
}

}  // namespace

FineGrainedDefinition definition_from_json(const json& j) {
    FineGrainedDefinition def;
    def.text = require(j, "text", "definition").get<std::string>();
    def.generator = j.value("generator", std::string("unknown"));
    def.word_count = whitespace_token_count(def.text);
    if (def.text.empty()) throw ValidationError("definition text is empty");
    if (j.contains("word_count") &&
        j.at("word_count").get<std::size_t>() != def.word_count) {
        throw ValidationError("definition word_count does not match text");
    }
    return def;
}

EventTypeRecord event_type_from_json(const json& j) {
    EventTypeRecord type;
    type.type_id = require(j, "type_id", "event type").get<std::string>();
    type.display_name = require(j, "display_name", "event type").get<std::string>();
    type.source_dataset = j.value("source_dataset", std::string());
    if (j.contains("serial_suffix") && !j.at("serial_suffix").is_null()) {
        type.serial_suffix = j.at("serial_suffix").get<int>();
    }
    if (j.contains("roles")) {
        type.roles = j.at("roles").get<std::vector<std::string>>();
    }
    if (j.contains("definition") && !j.at("definition").is_null()) {
        type.definition = definition_from_json(j.at("definition"));
    }
    if (type.type_id.empty()) throw ValidationError("event type has empty type_id");
    return type;
}

TriggerAnnotation trigger_from_json(const json& j) {
    TriggerAnnotation trigger;
    trigger.mention = require(j, "mention", "trigger").get<std::string>();
    trigger.type_id = require(j, "type_id", "trigger").get<std::string>();
    trigger.origin = j.contains("origin")
                         ? origin_from_string(j.at("origin").get<std::string>())
                         : TriggerOrigin::OriginalGold;
    normalize_mention(trigger.mention);  // non-empty after normalization
    return trigger;
}

DocumentRecord document_from_json(const json& j) {
    DocumentRecord doc;
    doc.doc_id = require(j, "doc_id", "document").get<std::string>();
    doc.text = require(j, "text", "document").get<std::string>();
    doc.source_dataset = j.value("source_dataset", std::string());
    doc.domain = j.value("domain", std::string());
    doc.token_count = whitespace_token_count(doc.text);
    if (j.contains("token_count") &&
        j.at("token_count").get<std::size_t>() != doc.token_count) {
        throw ValidationError("token_count does not match text for doc " + doc.doc_id);
    }
    if (j.contains("gold_events")) {
        for (const auto& t : j.at("gold_events")) {
            doc.gold_events.push_back(trigger_from_json(t));
        }
    }
    validate_document(doc);
    return doc;
}

PredictionRecord prediction_from_json(const json& j) {
    PredictionRecord pred;
    pred.doc_id = require(j, "doc_id", "prediction").get<std::string>();
    if (j.contains("triggers")) {
        for (const auto& t : j.at("triggers")) {
            pred.triggers.push_back(trigger_from_json(t));
        }
    }
    if (j.contains("generated_definitions")) {
        pred.generated_definitions =
            j.at("generated_definitions").get<std::map<std::string, std::string>>();
    }
    pred.raw_model_output = j.value("raw_model_output", std::string());
    pred.parse_failed = j.value("parse_failed", false);
    for (const auto& t : pred.triggers) {
        if (!pred.generated_definitions.count(t.type_id)) {
            throw ValidationError("prediction trigger type \"" + t.type_id +
                                  "\" has no generated definition (doc " +
                                  pred.doc_id + ")");
        }
    }
    return pred;
}

void validate_document(const DocumentRecord& doc) {
    if (doc.doc_id.empty()) throw ValidationError("document has empty doc_id");
    if (doc.token_count == 0) {
        throw ValidationError("document " + doc.doc_id + " has no tokens");
    }
}

void validate_ontology(std::span<const EventTypeRecord> types) {
    OntologyIndex index(types);  // throws on duplicate ids
    std::set<std::pair<std::string, int>> seen;
    for (const auto& t : types) {
        if (t.serial_suffix) {
            if (!seen.emplace(t.display_name, *t.serial_suffix).second) {
                throw ValidationError("duplicate (display_name, serial_suffix): " +
                                      t.display_name);
            }
        }
    }
}

void validate_release(const BenchmarkRelease& release) {
    if (!(release.nucleus_p > 0.0 && release.nucleus_p <= 1.0)) {
        throw ValidationError("nucleus_p must be in (0, 1]");
    }
    if (release.rounds < 1) throw ValidationError("rounds must be >= 1");
    validate_ontology(release.ontology);
    OntologyIndex index(release.ontology);
    std::set<std::string> doc_ids;
    for (const auto& doc : release.documents) {
        validate_document(doc);
        if (!doc_ids.insert(doc.doc_id).second) {
            throw ValidationError("duplicate doc_id: " + doc.doc_id);
        }
        for (const auto& trigger : doc.gold_events) {
            if (!index.contains(trigger.type_id)) {
                throw ValidationError("gold trigger type \"" + trigger.type_id +
                                      "\" of doc " + doc.doc_id +
                                      " is not in the ontology");
            }
        }
    }
}

std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus: " + path.string());
    std::vector<DocumentRecord> docs;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at " + path.string() + ":" +
                             std::to_string(lineno));
        }
        DocumentRecord doc;
        try {
            doc = document_from_json(j);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen_ids.insert(doc.doc_id).second) {
            throw ValidationError("duplicate doc_id \"" + doc.doc_id + "\" at " +
                                  path.string() + ":" + std::to_string(lineno));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void save_corpus(const std::filesystem::path& path, std::span<const DocumentRecord> docs) {
    std::ostringstream out;
    for (const auto& doc : docs) out << canonical_dump(to_json(doc)) << "\n";
    write_file_atomic(path, out.str());
}

std::vector<EventTypeRecord> load_ontology(const std::filesystem::path& path) {
    json j = parse_json(read_file(path), path.string());
    if (!j.is_array()) throw ParseError("ontology file must be a JSON array: " + path.string());
    std::vector<EventTypeRecord> types;
    types.reserve(j.size());
    for (const auto& item : j) types.push_back(event_type_from_json(item));
    validate_ontology(types);
    return types;
}

void save_ontology(const std::filesystem::path& path, std::span<const EventTypeRecord> types) {
    json arr = json::array();
    for (const auto& t : types) arr.push_back(to_json(t));
    write_file_atomic(path, canonical_dump(arr) + "\n");
}

BenchmarkRelease load_release(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open release: " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("release file is empty: " + path.string());
    }
    json header = parse_json(line, path.string() + " header");
    if (!header.contains("seoe_release")) {
        throw ParseError("not a release file (missing seoe_release header): " + path.string());
    }
    BenchmarkRelease release;
    release.nucleus_p = header.at("nucleus_p").get<double>();
    release.rounds = header.at("rounds").get<int>();
    if (header.contains("build_manifest")) {
        release.build_manifest =
            header.at("build_manifest").get<std::map<std::string, std::string>>();
    }
    for (const auto& t : header.at("ontology")) {
        release.ontology.push_back(event_type_from_json(t));
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at " + path.string() + ":" +
                             std::to_string(lineno));
        }
        release.documents.push_back(document_from_json(j));
    }
    validate_release(release);
    return release;
}

void save_release(const std::filesystem::path& path, const BenchmarkRelease& release) {
    validate_release(release);
    json ontology = json::array();
    for (const auto& t : release.ontology) ontology.push_back(to_json(t));
    json header{{"seoe_release", 1},
                {"nucleus_p", release.nucleus_p},
                {"rounds", release.rounds},
                {"build_manifest", release.build_manifest},
                {"ontology", std::move(ontology)}};
    std::ostringstream out;
    out << canonical_dump(header) << "\n";
    for (const auto& doc : release.documents) out << canonical_dump(to_json(doc)) << "\n";
    write_file_atomic(path, out.str());
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open predictions: " + path.string());
    std::vector<PredictionRecord> preds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at " + path.string() + ":" +
                             std::to_string(lineno));
        }
        preds.push_back(prediction_from_json(j));
    }
    return preds;
}

void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> preds) {
    std::ostringstream out;
    for (const auto& p : preds) out << canonical_dump(to_json(p)) << "\n";
    write_file_atomic(path, out.str());
}

}  // namespace seoe
