#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "annotator.hpp"
#include "gateway.hpp"
#include "groups.hpp"
#include "records.hpp"

namespace seoe {

// One supplementary trigger aggregated across rounds. count is the number of
// rounds containing the trigger (identity: normalized mention + type_id);
// the stored annotation keeps the first surface form seen.
struct TriggerStat {
    TriggerAnnotation trigger;
    std::string mention_norm;
    int count = 0;
    double relative_frequency = 0.0;  // count / sum of counts within the doc
};

struct TriggerFrequencyTable {
    int rounds = 0;
    std::map<std::string, std::vector<TriggerStat>> per_doc;
};

struct DuplicateGroup {
    std::string doc_id;
    std::vector<TriggerAnnotation> members;  // size >= 2, pairwise distinct
};

TriggerFrequencyTable tally(std::span<const AnnotationRound> rounds);

// Descending frequency (ties: count desc, mention asc, type_id asc), shortest
// prefix with cumulative relative frequency >= p. Pure.
std::vector<TriggerStat> nucleus_select_doc(std::vector<TriggerStat> stats, double p);
std::map<std::string, std::vector<TriggerStat>> nucleus_select(
    const TriggerFrequencyTable& table, double p);

// Candidate duplicates: one normalized mention contains the other, or the
// type_ids share a similarity group and the mentions share a token. Connected
// components of size >= 2 over selected + gold triggers.
std::vector<DuplicateGroup> propose_duplicate_groups(
    const std::string& doc_id, std::span<const TriggerStat> selected,
    std::span<const TriggerAnnotation> gold, const GroupSet& groups);

struct MergeConfig {
    std::string model;
};

// Judge-assisted reduction of each duplicate group. Replies naming non-member
// triggers (or failing to parse twice) fall back to the highest-frequency
// member. Returns the retained supplementary triggers; gold members only ever
// displace supplements, never themselves drop out of the release.
std::vector<TriggerAnnotation> merge_duplicates(
    const DocumentRecord& doc, std::span<const TriggerStat> selected,
    std::span<const DuplicateGroup> groups, const OntologyIndex& ontology,
    ProviderGateway& gateway, const MergeConfig& config);

struct ReleaseInputs {
    std::span<const DocumentRecord> corpus;
    std::span<const EventTypeRecord> ontology;
    std::span<const AnnotationRound> rounds;
    const GroupSet* groups = nullptr;
    double nucleus_p = 0.5;
    std::map<std::string, std::string> manifest_extras;
};

// Nucleus-select each document's supplements, merge redundancies, and union
// with the original gold annotations (which are always retained).
BenchmarkRelease assemble_release(const ReleaseInputs& inputs, ProviderGateway& gateway,
                                  const MergeConfig& config);

// selected.jsonl: header {"seoe_selection", "rounds", "p"} then
// {"doc_id", "triggers": [trigger + count + relative_frequency]} per line.
struct SavedSelection {
    std::map<std::string, std::vector<TriggerStat>> per_doc;
    int rounds = 0;
    double p = 1.0;
};

void save_selection(const std::filesystem::path& path,
                    const std::map<std::string, std::vector<TriggerStat>>& selection,
                    int rounds, double p);
SavedSelection load_selection(const std::filesystem::path& path);

// Variant used by the merge CLI path, starting from a saved selection.
BenchmarkRelease assemble_release_from_selection(
    std::span<const DocumentRecord> corpus, std::span<const EventTypeRecord> ontology,
    const std::map<std::string, std::vector<TriggerStat>>& selection, int rounds_count,
    double nucleus_p, const GroupSet* groups, ProviderGateway& gateway,
    const MergeConfig& config, std::map<std::string, std::string> manifest_extras);

}  // namespace seoe
