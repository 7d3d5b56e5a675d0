#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gateway.hpp"
#include "records.hpp"

namespace seoe {

// Partition of the ontology into semantically-similar event-type groups.
// Singletons are their own group.
struct GroupSet {
    double threshold = 0.8;
    std::vector<std::vector<std::string>> groups;   // each sorted; groups sorted by first id
    std::map<std::string, std::size_t> index;       // type_id -> group ordinal

    std::size_t group_of(const std::string& type_id) const;
};

// Connected components of the graph with an edge wherever sim[i][j] exceeds
// the threshold (strict). Pure; components hold row indices, each sorted,
// components ordered by smallest member.
std::vector<std::vector<std::size_t>> components_from_similarity(
    const std::vector<std::vector<double>>& similarity, double threshold);

// Embeds every type's definition through the gateway (batched, cached).
// Row i corresponds to types[i]. Throws ValidationError on a missing definition.
std::vector<std::vector<double>> embed_definitions(std::span<const EventTypeRecord> types,
                                                   ProviderGateway& gateway,
                                                   const std::string& embed_model);

GroupSet build_groups(std::span<const EventTypeRecord> types, double threshold,
                      ProviderGateway& gateway, const std::string& embed_model);

// Pure variant over a precomputed similarity matrix aligned with types.
GroupSet build_groups_from_similarity(std::span<const EventTypeRecord> types,
                                      const std::vector<std::vector<double>>& similarity,
                                      double threshold);

// Co-group members of type_id (excluding it), with definition texts.
std::vector<std::pair<std::string, std::string>> group_context(
    const std::string& type_id, const GroupSet& group_set,
    std::span<const EventTypeRecord> types);

GroupSet load_groups(const std::filesystem::path& path);
void save_groups(const std::filesystem::path& path, const GroupSet& group_set);

// Plain-text export for external visualization: "type_id\tv0 v1 ..." per line.
void export_embedding_matrix(const std::filesystem::path& path,
                             std::span<const EventTypeRecord> types,
                             const std::vector<std::vector<double>>& embeddings);

}  // namespace seoe
