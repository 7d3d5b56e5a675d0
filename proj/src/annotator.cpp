#include "annotator.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "prompts.hpp"
#include "text.hpp"

namespace seoe {

namespace {

std::vector<prompts::TriggerView> gold_views(const DocumentRecord& doc) {
    std::vector<prompts::TriggerView> views;
    views.reserve(doc.gold_events.size());
    for (const auto& t : doc.gold_events) views.push_back({t.mention, t.type_id});
    return views;
}

std::vector<prompts::NamedDefinition> gold_definitions(const DocumentRecord& doc,
                                                       const OntologyIndex& ontology) {
    std::vector<prompts::NamedDefinition> defs;
    std::set<std::string> seen;
    for (const auto& t : doc.gold_events) {
        if (!seen.insert(t.type_id).second) continue;
        const auto& type = ontology.at(t.type_id);
        defs.push_back({t.type_id, type.definition ? type.definition->text : std::string()});
    }
    return defs;
}

}  // namespace

std::set<std::size_t> select_from_similarities(
    const std::vector<std::vector<double>>& sims, int k, double tau) {
    if (k < 0) throw ValidationError("k must be >= 0");
    std::set<std::size_t> admitted;
    for (const auto& row : sims) {
        std::vector<std::size_t> order(row.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return row[a] > row[b];
        });
        std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
        for (std::size_t i = 0; i < take; ++i) admitted.insert(order[i]);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] >= tau) admitted.insert(i);
        }
    }
    return admitted;
}

std::vector<PossibleType> propose_possible_types(const DocumentRecord& doc,
                                                 const OntologyIndex& ontology,
                                                 ProviderGateway& gateway,
                                                 const AnnotatorConfig& config,
                                                 const std::string& round_tag) {
    ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.messages = {{"user", prompts::render_possible_types_prompt(
                                     doc.text, gold_views(doc),
                                     gold_definitions(doc, ontology))}};

    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        request.template_version = std::string(prompts::kProposeVersion) + "/" + round_tag +
                                   (attempt ? "/retry" : "");
        try {
            auto parsed = prompts::parse_possible_types_reply(gateway.chat(request));
            std::vector<PossibleType> possible;
            possible.reserve(parsed.size());
            for (auto& d : parsed) possible.push_back({std::move(d.name), std::move(d.definition)});
            return possible;
        } catch (const ParseError& e) {
            failure = e.what();
        }
    }
    throw AnnotationError("possible-type proposal failed for doc " + doc.doc_id +
                          " (stage=propose): " + failure);
}

LatentTypeSet select_latent_types(const DocumentRecord& doc,
                                  std::span<const PossibleType> possible,
                                  const OntologyIndex& ontology,
                                  const std::vector<std::vector<double>>& ontology_embeddings,
                                  ProviderGateway& gateway,
                                  const AnnotatorConfig& config) {
    if (ontology.size() == 0) throw ValidationError("ontology is empty");
    if (ontology_embeddings.size() != ontology.size()) {
        throw ValidationError("ontology embeddings do not match ontology size");
    }

    LatentTypeSet latent;
    latent.doc_id = doc.doc_id;
    if (possible.empty()) return latent;

    std::vector<std::string> texts;
    texts.reserve(possible.size());
    for (const auto& p : possible) texts.push_back(p.definition);
    auto possible_embeddings = gateway.embed({config.embed_model, texts});

    // Ontology order sorted by type_id so top-k ties resolve to the smaller id.
    std::vector<std::size_t> by_id(ontology.size());
    std::iota(by_id.begin(), by_id.end(), std::size_t{0});
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
        return ontology.types()[a].type_id < ontology.types()[b].type_id;
    });

    std::set<std::string> gold_types;
    for (const auto& t : doc.gold_events) gold_types.insert(t.type_id);

    for (std::size_t p = 0; p < possible.size(); ++p) {
        std::vector<std::vector<double>> sims(1, std::vector<double>(ontology.size()));
        for (std::size_t rank = 0; rank < by_id.size(); ++rank) {
            sims[0][rank] = cosine(possible_embeddings[p], ontology_embeddings[by_id[rank]]);
        }
        auto top = select_from_similarities(sims, config.k, 2.0);  // top-k only
        for (std::size_t rank = 0; rank < by_id.size(); ++rank) {
            double sim = sims[0][rank];
            bool in_top_k = top.count(rank) > 0;
            if (!in_top_k && sim < config.tau) continue;
            const std::string& type_id = ontology.types()[by_id[rank]].type_id;
            if (gold_types.count(type_id)) continue;
            LatentProvenance provenance{possible[p].name, sim,
                                        in_top_k ? LatentRule::TopK : LatentRule::Threshold};
            auto [it, inserted] = latent.types.emplace(type_id, provenance);
            if (!inserted && sim > it->second.similarity) it->second = provenance;
        }
    }
    return latent;
}

std::vector<TriggerAnnotation> supplement_annotations(const DocumentRecord& doc,
                                                      const LatentTypeSet& latent,
                                                      const OntologyIndex& ontology,
                                                      ProviderGateway& gateway,
                                                      const AnnotatorConfig& config,
                                                      const std::string& round_tag) {
    if (latent.types.empty()) return {};

    std::vector<prompts::NamedDefinition> latent_defs;
    for (const auto& [type_id, _] : latent.types) {
        const auto& type = ontology.at(type_id);
        latent_defs.push_back(
            {type_id, type.definition ? type.definition->text : std::string()});
    }

    ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.messages = {{"user", prompts::render_supplement_prompt(
                                     doc.text, gold_views(doc),
                                     gold_definitions(doc, ontology), latent_defs)}};

    std::vector<std::pair<std::string, std::string>> parsed;
    std::string failure;
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
        request.template_version = std::string(prompts::kSupplementVersion) + "/" +
                                   round_tag + (attempt ? "/retry" : "");
        try {
            parsed = prompts::parse_supplement_reply(gateway.chat(request));
            ok = true;
        } catch (const ParseError& e) {
            failure = e.what();
        }
    }
    if (!ok) {
        throw AnnotationError("supplementary annotation failed for doc " + doc.doc_id +
                              " (stage=supplement): " + failure);
    }

    const std::string text_norm = normalize_text(doc.text);
    std::set<TriggerIdentity> seen;
    for (const auto& t : doc.gold_events) seen.insert(trigger_identity(t));

    std::vector<TriggerAnnotation> supplements;
    for (const auto& [type_id, mention] : parsed) {
        if (!latent.types.count(type_id)) {
            log::warn("doc ", doc.doc_id, ": supplement for non-latent type \"", type_id,
                      "\" dropped");
            continue;
        }
        std::string mention_norm;
        try {
            mention_norm = normalize_mention(mention);
        } catch (const EmptyMentionError&) {
            log::warn("doc ", doc.doc_id, ": empty supplement mention dropped");
            continue;
        }
        if (text_norm.find(mention_norm) == std::string::npos) {
            log::warn("doc ", doc.doc_id, ": supplement mention \"", mention,
                      "\" not found in text, dropped");
            continue;
        }
        TriggerAnnotation trigger{mention, type_id, TriggerOrigin::Supplementary};
        if (!seen.insert(trigger_identity(trigger)).second) continue;
        supplements.push_back(std::move(trigger));
    }
    return supplements;
}

AnnotationRound run_round(std::span<const DocumentRecord> corpus,
                          const OntologyIndex& ontology,
                          const std::vector<std::vector<double>>& ontology_embeddings,
                          int round_index, ProviderGateway& gateway,
                          const AnnotatorConfig& config) {
    if (round_index < 1) throw ValidationError("round_index must be >= 1");
    const std::string round_tag = "r" + std::to_string(round_index);

    AnnotationRound round;
    round.round_index = round_index;
    std::vector<std::vector<TriggerAnnotation>> results(corpus.size());
    std::vector<std::string> errors(corpus.size());

    parallel_for(corpus.size(), gateway.max_concurrency(), [&](std::size_t i) {
        const DocumentRecord& doc = corpus[i];
        try {
            auto possible = propose_possible_types(doc, ontology, gateway, config, round_tag);
            auto latent = select_latent_types(doc, possible, ontology,
                                              ontology_embeddings, gateway, config);
            results[i] = supplement_annotations(doc, latent, ontology, gateway, config,
                                                round_tag);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    std::size_t failed = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!errors[i].empty()) {
            ++failed;
            log::warn("round ", round_index, ": doc ", corpus[i].doc_id, " failed: ",
                      errors[i]);
        }
        round.supplements[corpus[i].doc_id] = std::move(results[i]);
    }
    if (!corpus.empty() &&
        static_cast<double>(failed) / static_cast<double>(corpus.size()) >
            config.max_error_fraction) {
        throw RoundError("round " + std::to_string(round_index) + ": " +
                         std::to_string(failed) + " of " + std::to_string(corpus.size()) +
                         " documents failed");
    }
    return round;
}

void save_round(const std::filesystem::path& path, const AnnotationRound& round) {
    std::ostringstream out;
    for (const auto& [doc_id, triggers] : round.supplements) {
        json list = json::array();
        for (const auto& t : triggers) list.push_back(to_json(t));
        out << canonical_dump(json{{"doc_id", doc_id}, {"triggers", std::move(list)}})
            << "\n";
    }
    write_file_atomic(path, out.str());
}

AnnotationRound load_round(const std::filesystem::path& path, int round_index) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open round file: " + path.string());
    AnnotationRound round;
    round.round_index = round_index;
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
        std::vector<TriggerAnnotation> triggers;
        for (const auto& t : j.at("triggers")) triggers.push_back(trigger_from_json(t));
        auto doc_id = j.at("doc_id").get<std::string>();
        if (!round.supplements.emplace(doc_id, std::move(triggers)).second) {
            throw ValidationError("duplicate doc_id \"" + doc_id + "\" in " + path.string());
        }
    }
    return round;
}

}  // namespace seoe
