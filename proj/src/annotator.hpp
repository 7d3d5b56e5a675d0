#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gateway.hpp"
#include "records.hpp"

namespace seoe {

struct PossibleType {
    std::string name;
    std::string definition;
};

enum class LatentRule { TopK, Threshold };

struct LatentProvenance {
    std::string possible_type;
    double similarity = 0.0;
    LatentRule rule = LatentRule::TopK;
};

struct LatentTypeSet {
    std::string doc_id;
    std::map<std::string, LatentProvenance> types;  // type_id -> how it got in
};

struct AnnotationRound {
    int round_index = 1;
    // doc_id -> supplementary triggers; every corpus document has an entry.
    std::map<std::string, std::vector<TriggerAnnotation>> supplements;
};

struct AnnotatorConfig {
    std::string model;
    std::string embed_model;
    int k = 5;
    double tau = 0.8;
    double max_error_fraction = 0.10;  // round fails above this
    // Sampling temperature for the propose/supplement calls. Repeated rounds
    // only diverge on live providers when this is above zero.
    double temperature = 0.7;
};

// Per possible type (rows of sims): indices of the top-k ontology types by
// similarity (ties toward lower index, i.e. smaller type_id for a sorted
// ontology) unioned with every index at or above tau. Pure.
std::set<std::size_t> select_from_similarities(
    const std::vector<std::vector<double>>& sims, int k, double tau);

std::vector<PossibleType> propose_possible_types(const DocumentRecord& doc,
                                                 const OntologyIndex& ontology,
                                                 ProviderGateway& gateway,
                                                 const AnnotatorConfig& config,
                                                 const std::string& round_tag);

// Top-k / threshold filter against the full ontology; types already gold on
// the document are excluded.
LatentTypeSet select_latent_types(const DocumentRecord& doc,
                                  std::span<const PossibleType> possible,
                                  const OntologyIndex& ontology,
                                  const std::vector<std::vector<double>>& ontology_embeddings,
                                  ProviderGateway& gateway,
                                  const AnnotatorConfig& config);

// Step 4. Replies referencing non-latent types or mentions that do not occur
// in the text are dropped with a warning. Empty latent set short-circuits.
std::vector<TriggerAnnotation> supplement_annotations(const DocumentRecord& doc,
                                                      const LatentTypeSet& latent,
                                                      const OntologyIndex& ontology,
                                                      ProviderGateway& gateway,
                                                      const AnnotatorConfig& config,
                                                      const std::string& round_tag);

// One full propose -> select -> supplement pass over the corpus. Per-document
// failures are tolerated up to max_error_fraction, then the round fails.
AnnotationRound run_round(std::span<const DocumentRecord> corpus,
                          const OntologyIndex& ontology,
                          const std::vector<std::vector<double>>& ontology_embeddings,
                          int round_index, ProviderGateway& gateway,
                          const AnnotatorConfig& config);

// rounds/round_{i}.jsonl: {"doc_id", "triggers": [...]} per line.
void save_round(const std::filesystem::path& path, const AnnotationRound& round);
AnnotationRound load_round(const std::filesystem::path& path, int round_index);

}  // namespace seoe
