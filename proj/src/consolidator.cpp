#include "consolidator.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace seoe {

namespace {

bool tokens_intersect(const std::string& a_norm, const std::string& b_norm) {
    auto a_tokens = whitespace_tokens(a_norm);
    auto b_tokens = whitespace_tokens(b_norm);
    for (const auto& t : a_tokens) {
        if (std::find(b_tokens.begin(), b_tokens.end(), t) != b_tokens.end()) return true;
    }
    return false;
}

bool mention_contains(const std::string& a_norm, const std::string& b_norm) {
    return a_norm.find(b_norm) != std::string::npos ||
           b_norm.find(a_norm) != std::string::npos;
}

}  // namespace

TriggerFrequencyTable tally(std::span<const AnnotationRound> rounds) {
    if (rounds.empty()) throw ValidationError("tally requires at least one round");

    std::set<std::string> corpus_ids;
    for (const auto& [doc_id, _] : rounds.front().supplements) corpus_ids.insert(doc_id);
    for (const auto& round : rounds) {
        std::set<std::string> ids;
        for (const auto& [doc_id, _] : round.supplements) ids.insert(doc_id);
        if (ids != corpus_ids) {
            throw ValidationError("annotation rounds cover different corpora");
        }
    }

    TriggerFrequencyTable table;
    table.rounds = static_cast<int>(rounds.size());
    for (const auto& doc_id : corpus_ids) {
        std::map<TriggerIdentity, TriggerStat> stats;
        for (const auto& round : rounds) {
            std::set<TriggerIdentity> seen_this_round;
            for (const auto& trigger : round.supplements.at(doc_id)) {
                TriggerIdentity identity = trigger_identity(trigger);
                if (!seen_this_round.insert(identity).second) continue;
                auto [it, inserted] = stats.try_emplace(identity);
                if (inserted) {
                    it->second.trigger = trigger;
                    it->second.mention_norm = identity.mention_norm;
                }
                it->second.count += 1;
            }
        }
        int total = 0;
        for (const auto& [_, stat] : stats) total += stat.count;
        std::vector<TriggerStat> list;
        list.reserve(stats.size());
        for (auto& [_, stat] : stats) {
            stat.relative_frequency = total > 0 ? static_cast<double>(stat.count) / total : 0.0;
            list.push_back(std::move(stat));
        }
        table.per_doc[doc_id] = std::move(list);
    }
    return table;
}

std::vector<TriggerStat> nucleus_select_doc(std::vector<TriggerStat> stats, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p must be in (0, 1]");
    std::sort(stats.begin(), stats.end(), [](const TriggerStat& a, const TriggerStat& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.mention_norm != b.mention_norm) return a.mention_norm < b.mention_norm;
        return a.trigger.type_id < b.trigger.type_id;
    });
    double cumulative = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        cumulative += stats[i].relative_frequency;
        if (cumulative >= p) {
            stats.resize(i + 1);
            return stats;
        }
    }
    return stats;  // float shortfall: the full set covers any p
}

std::map<std::string, std::vector<TriggerStat>> nucleus_select(
    const TriggerFrequencyTable& table, double p) {
    std::map<std::string, std::vector<TriggerStat>> selected;
    for (const auto& [doc_id, stats] : table.per_doc) {
        selected[doc_id] = nucleus_select_doc(stats, p);
    }
    return selected;
}

std::vector<DuplicateGroup> propose_duplicate_groups(
    const std::string& doc_id, std::span<const TriggerStat> selected,
    std::span<const TriggerAnnotation> gold, const GroupSet& groups) {
    struct Node {
        TriggerAnnotation trigger;
        std::string mention_norm;
    };
    std::vector<Node> nodes;
    std::set<TriggerIdentity> seen;
    for (const auto& t : gold) {
        TriggerIdentity identity = trigger_identity(t);
        if (seen.insert(identity).second) nodes.push_back({t, identity.mention_norm});
    }
    for (const auto& s : selected) {
        TriggerIdentity identity{s.mention_norm, s.trigger.type_id};
        if (seen.insert(identity).second) nodes.push_back({s.trigger, s.mention_norm});
    }
    if (nodes.size() < 2) return {};

    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    auto same_group = [&](const std::string& a, const std::string& b) {
        auto ia = groups.index.find(a);
        auto ib = groups.index.find(b);
        return ia != groups.index.end() && ib != groups.index.end() &&
               ia->second == ib->second;
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            bool duplicate =
                mention_contains(nodes[i].mention_norm, nodes[j].mention_norm) ||
                (same_group(nodes[i].trigger.type_id, nodes[j].trigger.type_id) &&
                 tokens_intersect(nodes[i].mention_norm, nodes[j].mention_norm));
            if (duplicate) parent[find(i)] = find(j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < nodes.size(); ++i) components[find(i)].push_back(i);

    std::vector<DuplicateGroup> result;
    for (const auto& [_, members] : components) {
        if (members.size() < 2) continue;
        DuplicateGroup group;
        group.doc_id = doc_id;
        for (std::size_t index : members) group.members.push_back(nodes[index].trigger);
        result.push_back(std::move(group));
    }
    std::sort(result.begin(), result.end(), [](const DuplicateGroup& a, const DuplicateGroup& b) {
        return trigger_identity(a.members.front()) < trigger_identity(b.members.front());
    });
    return result;
}

std::vector<TriggerAnnotation> merge_duplicates(
    const DocumentRecord& doc, std::span<const TriggerStat> selected,
    std::span<const DuplicateGroup> groups, const OntologyIndex& ontology,
    ProviderGateway& gateway, const MergeConfig& config) {
    // Frequency lookup for fallbacks; gold members outrank any supplement.
    std::map<TriggerIdentity, int> frequency;
    for (const auto& s : selected) {
        frequency[{s.mention_norm, s.trigger.type_id}] = s.count;
    }
    for (const auto& t : doc.gold_events) {
        frequency[trigger_identity(t)] = std::numeric_limits<int>::max();
    }

    std::set<TriggerIdentity> grouped;
    for (const auto& group : groups) {
        for (const auto& member : group.members) grouped.insert(trigger_identity(member));
    }

    // Judge-selected identities, or fallback per group.
    std::set<TriggerIdentity> retained;
    if (!groups.empty()) {
        std::vector<prompts::MergeGroupView> views;
        std::set<std::string> type_ids;
        for (const auto& group : groups) {
            prompts::MergeGroupView view;
            for (const auto& member : group.members) {
                view.members.push_back({member.mention, member.type_id});
                type_ids.insert(member.type_id);
            }
            views.push_back(std::move(view));
        }
        std::vector<prompts::NamedDefinition> defs;
        for (const auto& type_id : type_ids) {
            const auto& type = ontology.at(type_id);
            defs.push_back({type_id, type.definition ? type.definition->text : std::string()});
        }

        ChatRequest request;
        request.model = config.model;
        request.temperature = 0.0;
        request.messages = {
            {"user", prompts::render_merge_prompt(doc.text, views, defs)}};

        std::vector<std::pair<std::string, std::string>> merged;
        bool parsed = false;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            request.template_version = std::string(prompts::kMergeVersion) +
                                       (attempt ? "/retry" : "");
            try {
                merged = prompts::parse_merge_reply(gateway.chat(request));
                parsed = true;
            } catch (const ParseError& e) {
                log::warn("doc ", doc.doc_id, ": merge reply unparseable (attempt ",
                          attempt + 1, "): ", e.what());
            }
        }

        std::set<TriggerIdentity> judged;
        if (parsed) {
            for (const auto& [span, type_id] : merged) {
                try {
                    TriggerIdentity identity{normalize_mention(span), type_id};
                    if (grouped.count(identity)) {
                        judged.insert(identity);
                    } else {
                        log::warn("doc ", doc.doc_id, ": merge reply names non-member \"",
                                  span, "\" / ", type_id);
                    }
                } catch (const EmptyMentionError&) {
                    log::warn("doc ", doc.doc_id, ": merge reply has empty span");
                }
            }
        }

        for (const auto& group : groups) {
            std::vector<TriggerIdentity> kept;
            for (const auto& member : group.members) {
                TriggerIdentity identity = trigger_identity(member);
                if (judged.count(identity)) kept.push_back(identity);
            }
            if (kept.empty()) {
                // Highest-frequency member wins; ties to the first member.
                const TriggerAnnotation* best = nullptr;
                int best_count = -1;
                for (const auto& member : group.members) {
                    int count = frequency[trigger_identity(member)];
                    if (count > best_count) {
                        best = &member;
                        best_count = count;
                    }
                }
                kept.push_back(trigger_identity(*best));
                if (parsed) {
                    log::warn("doc ", doc.doc_id,
                              ": merge reply kept nothing from a group; falling back to "
                              "highest-frequency member \"",
                              best->mention, "\"");
                }
            }
            retained.insert(kept.begin(), kept.end());
        }
    }

    std::vector<TriggerAnnotation> result;
    for (const auto& s : selected) {
        TriggerIdentity identity{s.mention_norm, s.trigger.type_id};
        if (!grouped.count(identity) || retained.count(identity)) {
            result.push_back(s.trigger);
        }
    }
    return result;
}

namespace {

BenchmarkRelease assemble_from_selection(
    std::span<const DocumentRecord> corpus, std::span<const EventTypeRecord> ontology,
    const std::map<std::string, std::vector<TriggerStat>>& selection, int rounds_count,
    double nucleus_p, const GroupSet* groups, ProviderGateway& gateway,
    const MergeConfig& config, std::map<std::string, std::string> manifest_extras) {
    OntologyIndex index(ontology);
    GroupSet empty_groups;
    const GroupSet& group_set = groups ? *groups : empty_groups;

    BenchmarkRelease release;
    release.ontology.assign(ontology.begin(), ontology.end());
    release.nucleus_p = nucleus_p;
    release.rounds = rounds_count > 0 ? rounds_count : 1;
    release.build_manifest = std::move(manifest_extras);
    release.build_manifest["merge"] =
        config.model + "/" + prompts::kMergeVersion;
    release.documents.assign(corpus.begin(), corpus.end());

    parallel_for(release.documents.size(), gateway.max_concurrency(), [&](std::size_t i) {
        DocumentRecord& doc = release.documents[i];
        auto it = selection.find(doc.doc_id);
        if (it == selection.end() || it->second.empty()) return;
        auto duplicate_groups =
            propose_duplicate_groups(doc.doc_id, it->second, doc.gold_events, group_set);
        auto retained =
            merge_duplicates(doc, it->second, duplicate_groups, index, gateway, config);
        for (auto& trigger : retained) doc.gold_events.push_back(std::move(trigger));
    });

    validate_release(release);
    return release;
}

}  // namespace

BenchmarkRelease assemble_release(const ReleaseInputs& inputs, ProviderGateway& gateway,
                                  const MergeConfig& config) {
    std::map<std::string, std::vector<TriggerStat>> selection;
    if (!inputs.rounds.empty()) {
        selection = nucleus_select(tally(inputs.rounds), inputs.nucleus_p);
    }
    return assemble_from_selection(inputs.corpus, inputs.ontology, selection,
                                   static_cast<int>(inputs.rounds.size()),
                                   inputs.nucleus_p, inputs.groups, gateway, config,
                                   inputs.manifest_extras);
}

void save_selection(const std::filesystem::path& path,
                    const std::map<std::string, std::vector<TriggerStat>>& selection,
                    int rounds, double p) {
    std::ostringstream out;
    out << canonical_dump(json{{"seoe_selection", 1}, {"rounds", rounds}, {"p", p}}) << "\n";
    for (const auto& [doc_id, stats] : selection) {
        json triggers = json::array();
        for (const auto& s : stats) {
            json t = to_json(s.trigger);
            t["count"] = s.count;
            t["relative_frequency"] = s.relative_frequency;
            triggers.push_back(std::move(t));
        }
        out << canonical_dump(json{{"doc_id", doc_id}, {"triggers", std::move(triggers)}})
            << "\n";
    }
    write_file_atomic(path, out.str());
}

SavedSelection load_selection(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open selection: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("selection file is empty: " + path.string());
    json header = parse_json(line, path.string() + " header");
    if (!header.contains("seoe_selection")) {
        throw ParseError("not a selection file: " + path.string());
    }
    SavedSelection saved;
    saved.rounds = header.at("rounds").get<int>();
    saved.p = header.value("p", 1.0);

    std::map<std::string, std::vector<TriggerStat>> selection;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON at " + path.string() + ":" +
                             std::to_string(lineno));
        }
        std::vector<TriggerStat> stats;
        for (const auto& t : j.at("triggers")) {
            TriggerStat stat;
            stat.trigger = trigger_from_json(t);
            stat.mention_norm = normalize_mention(stat.trigger.mention);
            stat.count = t.at("count").get<int>();
            stat.relative_frequency = t.at("relative_frequency").get<double>();
            stats.push_back(std::move(stat));
        }
        selection[j.at("doc_id").get<std::string>()] = std::move(stats);
    }
    saved.per_doc = std::move(selection);
    return saved;
}

// Exposed for the merge CLI path, which starts from a saved selection.
BenchmarkRelease assemble_release_from_selection(
    std::span<const DocumentRecord> corpus, std::span<const EventTypeRecord> ontology,
    const std::map<std::string, std::vector<TriggerStat>>& selection, int rounds_count,
    double nucleus_p, const GroupSet* groups, ProviderGateway& gateway,
    const MergeConfig& config, std::map<std::string, std::string> manifest_extras) {
    return assemble_from_selection(corpus, ontology, selection, rounds_count, nucleus_p,
                                   groups, gateway, config, std::move(manifest_extras));
}

}  // namespace seoe
