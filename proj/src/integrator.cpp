#include "integrator.hpp"

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "prompts.hpp"
#include "shuffle.hpp"
#include "text.hpp"

namespace seoe {

IntegrationPlan load_integration_plan(const std::filesystem::path& manifest_path,
                                      int quota) {
    json manifest = parse_json(read_file(manifest_path), manifest_path.string());
    if (quota < 1) throw ValidationError("quota must be >= 1");

    IntegrationPlan plan;
    plan.quota = quota;
    const auto base = manifest_path.parent_path();
    for (const auto& entry : manifest.at("sources")) {
        SourceSet source;
        source.name = entry.at("name").get<std::string>();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_absolute() ? path : base / path;
        };
        source.ontology = load_ontology(resolve(entry.at("ontology").get<std::string>()));
        source.corpus = load_corpus(resolve(entry.at("corpus").get<std::string>()));
        for (auto& type : source.ontology) type.source_dataset = source.name;
        for (auto& doc : source.corpus) doc.source_dataset = source.name;
        plan.sources.push_back(std::move(source));
    }
    if (plan.sources.empty()) throw ValidationError("integration manifest has no sources");
    return plan;
}

std::vector<EventTypeRecord> integrate_ontologies(std::span<const SourceSet> sources) {
    std::vector<EventTypeRecord> merged;
    std::map<std::string, int> serial_by_name;
    for (const auto& source : sources) {
        std::set<std::string> source_ids;
        for (const auto& type : source.ontology) {
            if (!source_ids.insert(type.type_id).second) {
                throw ValidationError("duplicate type_id \"" + type.type_id +
                                      "\" in source " + source.name);
            }
            EventTypeRecord out = type;
            int serial = ++serial_by_name[type.display_name];
            out.serial_suffix = serial;
            out.type_id = type.display_name + "_" + std::to_string(serial);
            out.source_dataset = source.name;
            merged.push_back(std::move(out));
        }
    }
    validate_ontology(merged);
    return merged;
}

IntegrationResult integrate(const IntegrationPlan& plan) {
    IntegrationResult result;
    result.ontology = integrate_ontologies(plan.sources);

    // (source, source type_id) -> merged type_id
    std::map<std::pair<std::string, std::string>, std::string> remap;
    std::size_t cursor = 0;
    for (const auto& source : plan.sources) {
        for (const auto& type : source.ontology) {
            remap[{source.name, type.type_id}] = result.ontology[cursor++].type_id;
        }
    }

    std::set<std::string> doc_ids;
    for (const auto& source : plan.sources) {
        for (const auto& doc : source.corpus) {
            if (!doc_ids.insert(doc.doc_id).second) {
                throw ValidationError("doc_id \"" + doc.doc_id +
                                      "\" appears in more than one source corpus");
            }
            DocumentRecord out = doc;
            for (auto& trigger : out.gold_events) {
                auto it = remap.find({source.name, trigger.type_id});
                if (it == remap.end()) {
                    throw ValidationError("doc " + doc.doc_id + " references type \"" +
                                          trigger.type_id + "\" missing from source " +
                                          source.name);
                }
                trigger.type_id = it->second;
            }
            result.corpus.push_back(std::move(out));
        }
    }
    return result;
}

std::vector<DocumentRecord> sample_corpus(std::span<const DocumentRecord> docs,
                                          int quota, std::uint64_t seed,
                                          std::vector<std::string>* warnings) {
    if (quota < 1) throw ValidationError("quota must be >= 1");

    std::map<std::string, int> coverage;
    for (const auto& doc : docs) {
        std::set<std::string> types;
        for (const auto& t : doc.gold_events) types.insert(t.type_id);
        for (const auto& t : types) coverage.emplace(t, 0);
    }

    auto order = shuffled_indices(docs.size(), seed);
    std::vector<std::size_t> admitted;
    for (std::size_t index : order) {
        const auto& doc = docs[index];
        std::set<std::string> types;
        for (const auto& t : doc.gold_events) types.insert(t.type_id);
        bool wanted = false;
        for (const auto& t : types) {
            if (coverage[t] < quota) {
                wanted = true;
                break;
            }
        }
        if (!wanted) continue;
        admitted.push_back(index);
        for (const auto& t : types) ++coverage[t];
    }
    std::sort(admitted.begin(), admitted.end());

    if (warnings) {
        for (const auto& [type_id, count] : coverage) {
            if (count < quota) {
                warnings->push_back("type " + type_id + " covered by only " +
                                    std::to_string(count) + " documents (quota " +
                                    std::to_string(quota) + ")");
            }
        }
    }

    std::vector<DocumentRecord> sampled;
    sampled.reserve(admitted.size());
    for (std::size_t index : admitted) sampled.push_back(docs[index]);
    return sampled;
}

std::map<std::string, std::vector<std::pair<std::string, std::string>>> collect_examples(
    std::span<const DocumentRecord> docs, std::size_t max_per_type) {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> examples;
    for (const auto& doc : docs) {
        for (const auto& trigger : doc.gold_events) {
            auto& list = examples[trigger.type_id];
            if (list.size() < max_per_type) {
                list.emplace_back(doc.text, trigger.mention);
            }
        }
    }
    return examples;
}

void generate_definitions(
    std::vector<EventTypeRecord>& ontology,
    const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& examples,
    ProviderGateway& gateway, const std::string& model) {
    parallel_for(ontology.size(), gateway.max_concurrency(), [&](std::size_t i) {
        EventTypeRecord& type = ontology[i];
        if (type.definition) return;

        std::vector<prompts::DefinitionExample> prompt_examples;
        if (auto it = examples.find(type.type_id); it != examples.end()) {
            for (const auto& [text, mention] : it->second) {
                prompt_examples.push_back({text, mention});
            }
        }
        ChatRequest request;
        request.model = model;
        request.temperature = 0.0;
        request.template_version = prompts::kDefineVersion;
        request.messages = {{"user", prompts::render_definition_prompt(
                                         type.display_name, type.roles, prompt_examples)}};

        std::string failure;
        for (int attempt = 0; attempt < 2; ++attempt) {
            // Nudge the cache key on the retry so it is not served the same
            // bad reply.
            request.template_version = attempt == 0
                                           ? prompts::kDefineVersion
                                           : std::string(prompts::kDefineVersion) + "/retry";
            try {
                auto reply = prompts::parse_definition_reply(gateway.chat(request));
                if (reply.event_type != type.display_name) {
                    failure = "reply event_type \"" + reply.event_type +
                              "\" does not match \"" + type.display_name + "\"";
                    continue;
                }
                FineGrainedDefinition def;
                def.text = reply.detailed_definition;
                def.word_count = whitespace_token_count(def.text);
                def.generator = model + "/" + prompts::kDefineVersion;
                type.definition = std::move(def);
                return;
            } catch (const ParseError& e) {
                failure = e.what();
            }
        }
        throw DefinitionError("definition generation failed for " + type.type_id +
                              ": " + failure);
    });
}

}  // namespace seoe
