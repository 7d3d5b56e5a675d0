#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gateway.hpp"
#include "records.hpp"

namespace seoe {

struct SourceSet {
    std::string name;  // dataset name; becomes source_dataset on its types
    std::vector<EventTypeRecord> ontology;
    std::vector<DocumentRecord> corpus;
};

struct IntegrationPlan {
    std::vector<SourceSet> sources;
    int quota = 10;  // per-type document coverage target
};

// Manifest file: {"sources": [{"name", "ontology", "corpus"}], ...} with
// paths resolved relative to the manifest location.
IntegrationPlan load_integration_plan(const std::filesystem::path& manifest_path,
                                      int quota);

struct IntegrationResult {
    std::vector<EventTypeRecord> ontology;  // merged, serial-suffixed ids
    std::vector<DocumentRecord> corpus;     // gold type_ids remapped
};

// Union of all source types. Same display names are kept apart with serial
// suffixes assigned in source order; type_id = display_name + "_" + serial.
std::vector<EventTypeRecord> integrate_ontologies(std::span<const SourceSet> sources);

// Merge + remap every source document's gold type_ids onto the merged ids.
IntegrationResult integrate(const IntegrationPlan& plan);

// Greedy single-pass coverage sampling over a deterministic shuffle: a
// document is admitted while any of its types is below quota, and admission
// counts toward all of its types. Types rarer than the quota end up fully
// included. Under-covered types are reported as warnings.
std::vector<DocumentRecord> sample_corpus(std::span<const DocumentRecord> docs,
                                          int quota, std::uint64_t seed,
                                          std::vector<std::string>* warnings = nullptr);

// Up to max_per_type example (text, mention) pairs per type, in corpus order.
std::map<std::string, std::vector<std::pair<std::string, std::string>>> collect_examples(
    std::span<const DocumentRecord> docs, std::size_t max_per_type = 3);

// Step 2: attach a generated FineGrainedDefinition to every type that lacks
// one. A reply whose event_type does not echo the display name is retried
// once, then raises DefinitionError.
void generate_definitions(
    std::vector<EventTypeRecord>& ontology,
    const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& examples,
    ProviderGateway& gateway, const std::string& model);

}  // namespace seoe
