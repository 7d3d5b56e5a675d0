#pragma once

// A 20-document, two-source fixture with a fully scripted mock provider.
// Embeddings are pinned so the latent filter, groups, merging, inference, and
// judging all take deterministic, hand-checkable paths:
//   - docs 0-9 come from source "alpha" (gold Protest_1), 10-19 from "beta"
//     (gold Protest_2); even docs mention a blaze, odd ones do not.
//   - three annotation rounds supplement "responded" (every round), "blaze"
//     (rounds 2-3), "smoke" (round 3), "a protest" (rounds 1-2).
//   - the merge judge always keeps the original "protest" trigger.
//   - inference predicts "protest" everywhere plus "blaze" on even docs; the
//     judge matches prediction 0 to gold 0.

#include <string>
#include <vector>

#include "jsonio.hpp"
#include "support.hpp"

namespace seoe::test {

struct PipelineFixture {
    std::filesystem::path dir;
    std::filesystem::path config;
    std::filesystem::path mock_script;
    std::filesystem::path sources_manifest;
};

inline std::string fixture_doc_text(int i) {
    std::string text = "Doc " + std::to_string(i) +
                       ": A protest erupted downtown and police responded quickly.";
    if (i % 2 == 0) text += " A blaze and smoke spread nearby.";
    return text;
}

inline PipelineFixture build_pipeline_fixture(const std::filesystem::path& dir,
                                              int rounds = 3) {
    const std::string protest_def =
        "people gather in public to demonstrate against authority";
    const std::string fire_def =
        "an uncontrolled fire burns property and spreads quickly";
    const std::string response_def =
        "authorities react to an incident with coordinated action";
    const std::string crowd_def = "citizens assemble to voice their demands loudly";
    const std::string emergency_def = "responders coordinate to contain an emergency";

    // Source ontologies (pre-integration ids are the bare display names).
    json alpha_ontology = json::array(
        {json{{"type_id", "Protest"}, {"display_name", "Protest"}, {"roles", {"Agent"}}},
         json{{"type_id", "Fire"}, {"display_name", "Fire"}, {"roles", {"Place"}}}});
    json beta_ontology = json::array(
        {json{{"type_id", "Protest"}, {"display_name", "Protest"}, {"roles", {"Agent"}}},
         json{{"type_id", "Response"}, {"display_name", "Response"}, {"roles", {"Agent"}}}});

    std::string alpha_corpus, beta_corpus;
    for (int i = 0; i < 20; ++i) {
        json doc{{"doc_id", "doc" + std::to_string(i)},
                 {"text", fixture_doc_text(i)},
                 {"source_dataset", i < 10 ? "alpha" : "beta"},
                 {"domain", "news"},
                 {"gold_events", json::array({json{{"mention", "protest"},
                                                   {"type_id", "Protest"},
                                                   {"origin", "original_gold"}}})}};
        (i < 10 ? alpha_corpus : beta_corpus) += canonical_dump(doc) + "\n";
    }
    write_text(dir / "alpha.ontology.json", canonical_dump(alpha_ontology));
    write_text(dir / "beta.ontology.json", canonical_dump(beta_ontology));
    write_text(dir / "alpha.corpus.jsonl", alpha_corpus);
    write_text(dir / "beta.corpus.jsonl", beta_corpus);

    json manifest{{"sources", json::array({json{{"name", "alpha"},
                                                {"ontology", "alpha.ontology.json"},
                                                {"corpus", "alpha.corpus.jsonl"}},
                                           json{{"name", "beta"},
                                                {"ontology", "beta.ontology.json"},
                                                {"corpus", "beta.corpus.jsonl"}}})}};
    write_text(dir / "sources.json", canonical_dump(manifest));

    auto define_reply = [](const std::string& name, const std::string& definition) {
        return json{{"event_type", name}, {"detailed_definition", definition}};
    };
    json propose_reply{
        {"text_analysis", "the text describes unrest and an emergency"},
        {"possible_event_types",
         json::array({json{{"event_type", "crowd action"}, {"detailed_definition", crowd_def}},
                      json{{"event_type", "emergency handling"},
                           {"detailed_definition", emergency_def}}})}};
    auto supplement_reply = [](std::vector<std::pair<std::string, std::string>> items) {
        json list = json::array();
        for (const auto& [type_id, word] : items) {
            list.push_back(json{{"event_type", type_id}, {"trigger_word", word}});
        }
        return json{{"text_analysis", "supplementing"},
                    {"supplemented_annotations", std::move(list)}};
    };
    json merge_reply{{"Text Analysis", "the protest is the anchor event"},
                     {"Group Analysis", json::array({"keep the original trigger"})},
                     {"Merged Triggers",
                      json::array({json{{"Trigger Span", "protest"},
                                        {"Event Type", "Protest_1"}}})}};
    json infer_even{{"Text Analysis", "a protest and a fire"},
                    {"Event Type Generation",
                     json{{"Public Protest", "a public demonstration against something"},
                          {"Fire Outbreak", "an uncontrolled blaze"}}},
                    {"Extraction Results",
                     json::array({json{{"Trigger Span", "protest"},
                                       {"Event Type", "Public Protest"}},
                                  json{{"Trigger Span", "blaze"},
                                       {"Event Type", "Fire Outbreak"}}})}};
    json infer_odd{{"Text Analysis", "a protest"},
                   {"Event Type Generation",
                    json{{"Public Protest", "a public demonstration against something"}}},
                   {"Extraction Results",
                    json::array({json{{"Trigger Span", "protest"},
                                      {"Event Type", "Public Protest"}}})}};
    json judge_reply{{"text_analysis", "both sets describe the protest"},
                     {"golden_triggers_understanding", json::array()},
                     {"predicted_triggers_understanding", json::array()},
                     {"possible_matching_pairs", json::array()},
                     {"final_output", json::array({json{{"Gold_trigger_index", 0},
                                                        {"Pred_trigger_index", 0}}})}};

    json rules = json::array();
    rules.push_back(json{{"template", "define.v1"},
                         {"contains", "Event Type Name: Protest"},
                         {"reply", define_reply("Protest", protest_def)}});
    rules.push_back(json{{"template", "define.v1"},
                         {"contains", "Event Type Name: Fire"},
                         {"reply", define_reply("Fire", fire_def)}});
    rules.push_back(json{{"template", "define.v1"},
                         {"contains", "Event Type Name: Response"},
                         {"reply", define_reply("Response", response_def)}});
    rules.push_back(json{{"template", "propose.v1"}, {"reply", propose_reply}});
    rules.push_back(json{{"template", "supplement.v1/r1"},
                         {"reply", supplement_reply({{"Response_1", "responded"},
                                                     {"Protest_2", "a protest"}})}});
    rules.push_back(json{{"template", "supplement.v1/r2"},
                         {"reply", supplement_reply({{"Response_1", "responded"},
                                                     {"Fire_1", "blaze"},
                                                     {"Protest_2", "a protest"}})}});
    for (int r = 3; r <= rounds; ++r) {
        rules.push_back(json{{"template", "supplement.v1/r" + std::to_string(r)},
                             {"reply", supplement_reply({{"Response_1", "responded"},
                                                         {"Fire_1", "blaze"},
                                                         {"Fire_1", "smoke"}})}});
    }
    rules.push_back(json{{"template", "merge.v1"}, {"reply", merge_reply}});
    rules.push_back(json{{"template", "infer.v1"},
                         {"contains", "A blaze"},
                         {"reply", infer_even}});
    rules.push_back(json{{"template", "infer.v1"}, {"reply", infer_odd}});
    rules.push_back(json{{"template", "judge.v1"}, {"reply", judge_reply}});

    json embeddings{{protest_def, {1.0, 0.0, 0.0}},
                    {fire_def, {0.0, 1.0, 0.0}},
                    {response_def, {0.0, 0.0, 1.0}},
                    {crowd_def, {0.95, 0.3122498999199199, 0.0}},
                    {emergency_def, {0.0, 0.5, 0.8660254037844386}}};

    json script{{"embedding_dim", 3}, {"embeddings", embeddings}, {"chat", rules}};
    write_text(dir / "mock_script.json", canonical_dump(script));

    json config{{"sources", manifest.at("sources")},
                {"quota", 10},
                {"seed", 11},
                {"models", json{{"annotate", "annotator-mock"},
                                {"judge", "judge-mock"},
                                {"embed", "embedder-mock"},
                                {"infer", {"oded-mock"}}}},
                {"k", 2},
                {"tau", 0.8},
                {"rounds", rounds},
                {"p_values", {0.3, 0.5, 0.7}},
                {"evaluate_p", 0.5},
                {"group_threshold", 0.8},
                {"replicates", 2},
                {"max_tokens", 512},
                {"evaluate", true}};
    write_text(dir / "seoe.config.json", canonical_dump(config));

    PipelineFixture fixture;
    fixture.dir = dir;
    fixture.config = dir / "seoe.config.json";
    fixture.mock_script = dir / "mock_script.json";
    fixture.sources_manifest = dir / "sources.json";
    return fixture;
}

}  // namespace seoe::test
