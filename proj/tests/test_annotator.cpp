#include <doctest.h>

#include <random>

#include "annotator.hpp"
#include "errors.hpp"
#include "groups.hpp"
#include "support.hpp"

using namespace seoe;
using test::TempDir;

namespace {

// Ontology of six types A..F whose definition embeddings are pinned so that
// cosine similarity to the single possible type "probe definition" is exactly
// {A:0.95, B:0.85, C:0.75, D:0.60, E:0.50, F:0.40}.
struct LatentFixture {
    std::vector<EventTypeRecord> ontology;
    json script;

    LatentFixture() {
        const std::vector<std::pair<std::string, double>> sims{
            {"A", 0.95}, {"B", 0.85}, {"C", 0.75}, {"D", 0.60}, {"E", 0.50}, {"F", 0.40}};
        json embeddings = json::object();
        for (const auto& [name, sim] : sims) {
            ontology.push_back(test::make_type(name + "_1", name, "definition of " + name));
            double orth = std::sqrt(1.0 - sim * sim);
            embeddings["definition of " + name] = std::vector<double>{sim, orth};
        }
        embeddings["probe definition"] = std::vector<double>{1.0, 0.0};
        script = json{{"embedding_dim", 2}, {"embeddings", std::move(embeddings)}};
    }
};

std::set<std::size_t> brute_force_select(const std::vector<std::vector<double>>& sims,
                                         int k, double tau) {
    std::set<std::size_t> out;
    for (const auto& row : sims) {
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < row.size(); ++i) ranked.push_back({row[i], i});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; i < std::min<std::size_t>(k, ranked.size()); ++i) {
            out.insert(ranked[i].second);
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] >= tau) out.insert(i);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("select_from_similarities: top-k union threshold") {
    std::vector<std::vector<double>> sims{{0.95, 0.85, 0.75, 0.60, 0.50, 0.40}};
    CHECK(select_from_similarities(sims, 5, 0.8) ==
          std::set<std::size_t>{0, 1, 2, 3, 4});
    CHECK(select_from_similarities(sims, 2, 0.8) == std::set<std::size_t>{0, 1});
    std::vector<std::vector<double>> two{{0.70, 0.90}};
    CHECK(select_from_similarities(two, 1, 0.8) == std::set<std::size_t>{1});
}

TEST_CASE("select_from_similarities matches brute force and is monotone") {
    std::mt19937_64 rng(2024);
    auto uniform = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t possible = 1 + rng() % 4;
        std::size_t types = 1 + rng() % 20;
        std::vector<std::vector<double>> sims(possible, std::vector<double>(types));
        for (auto& row : sims) {
            for (auto& s : row) s = uniform();
        }
        int k = static_cast<int>(rng() % (types + 2));
        double tau = uniform();
        auto got = select_from_similarities(sims, k, tau);
        CHECK(got == brute_force_select(sims, k, tau));

        // Monotone in k, anti-monotone in tau.
        auto more_k = select_from_similarities(sims, k + 1, tau);
        CHECK(std::includes(more_k.begin(), more_k.end(), got.begin(), got.end()));
        auto lower_tau = select_from_similarities(sims, k, tau * 0.5);
        CHECK(std::includes(lower_tau.begin(), lower_tau.end(), got.begin(), got.end()));
    }
}

TEST_CASE("propose_possible_types parses the documented reply shape") {
    TempDir dir;
    json reply{{"text_analysis", "the text discusses a war"},
               {"possible_event_types",
                json::array({json{{"event_type", "Response"},
                                  {"detailed_definition", "reaction of parties"}},
                             json{{"event_type", "Reporting"},
                                  {"detailed_definition", "news coverage of events"}}})}};
    json script{{"chat", json::array({json{{"template", "propose.v1"}, {"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);

    std::vector<EventTypeRecord> types{test::make_type("Attack_1", "Attack", "violence")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "How is the world reacting to the war in Iraq?",
                              {{"war", "Attack_1", TriggerOrigin::OriginalGold}});
    AnnotatorConfig config{"gpt-4o-mock", "embedder", 5, 0.8, 0.1};

    auto possible = propose_possible_types(doc, ontology, gateway, config, "r1");
    REQUIRE(possible.size() == 2);
    CHECK(possible[0].name == "Response");
    CHECK(possible[1].definition == "news coverage of events");
}

TEST_CASE("propose accepts an empty list and fails on a missing key") {
    TempDir dir;
    json script{{"chat", json::array({
                            json{{"template", "propose.v1/r1"},
                                 {"reply", json{{"text_analysis", "nothing"},
                                                {"possible_event_types", json::array()}}}},
                            json{{"template", "propose.v1/r2"},
                                 {"reply", json{{"text_analysis", "missing list"}}}},
                        })}};
    auto gateway = test::make_mock_gateway(dir, script);
    std::vector<EventTypeRecord> types{test::make_type("Attack_1", "Attack", "violence")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "Quiet day in town.");
    AnnotatorConfig config{"m", "e", 5, 0.8, 0.1};

    CHECK(propose_possible_types(doc, ontology, gateway, config, "r1").empty());
    CHECK_THROWS_AS(propose_possible_types(doc, ontology, gateway, config, "r2"),
                    AnnotationError);
}

TEST_CASE("select_latent_types applies both rules and skips gold types") {
    TempDir dir;
    LatentFixture fixture;
    auto gateway = test::make_mock_gateway(dir, fixture.script);
    OntologyIndex ontology(fixture.ontology);
    auto embeddings = embed_definitions(fixture.ontology, gateway, "embedder");

    std::vector<PossibleType> possible{{"probe", "probe definition"}};
    auto doc = test::make_doc("d1", "text");
    AnnotatorConfig config{"m", "embedder", 5, 0.8, 0.1};

    auto latent = select_latent_types(doc, possible, ontology, embeddings, gateway, config);
    std::set<std::string> ids;
    for (const auto& [id, _] : latent.types) ids.insert(id);
    CHECK(ids == std::set<std::string>{"A_1", "B_1", "C_1", "D_1", "E_1"});
    CHECK(latent.types.at("A_1").rule == LatentRule::TopK);
    CHECK(latent.types.at("A_1").similarity == doctest::Approx(0.95));
    CHECK(latent.types.at("A_1").possible_type == "probe");

    SUBCASE("k=2 keeps the threshold-admitted pair") {
        config.k = 2;
        auto narrow = select_latent_types(doc, possible, ontology, embeddings, gateway, config);
        std::set<std::string> narrow_ids;
        for (const auto& [id, _] : narrow.types) narrow_ids.insert(id);
        CHECK(narrow_ids == std::set<std::string>{"A_1", "B_1"});
    }
    SUBCASE("gold-annotated types are excluded") {
        auto gold_doc = test::make_doc("d2", "text",
                                       {{"t", "A_1", TriggerOrigin::OriginalGold}});
        auto no_a =
            select_latent_types(gold_doc, possible, ontology, embeddings, gateway, config);
        CHECK_FALSE(no_a.types.count("A_1"));
        CHECK(no_a.types.count("B_1"));
    }
    SUBCASE("empty ontology is rejected") {
        OntologyIndex empty;
        CHECK_THROWS_AS(
            select_latent_types(doc, possible, empty, {}, gateway, config),
            ValidationError);
    }
}

TEST_CASE("supplement_annotations guards mentions and types") {
    TempDir dir;
    json reply{{"text_analysis", "war implies a response"},
               {"supplemented_annotations",
                json::array({
                    json{{"event_type", "Response_1"}, {"trigger_word", "Reacting"}},
                    json{{"event_type", "Response_1"}, {"trigger_word", "absent"}},
                    json{{"event_type", "NotLatent_1"}, {"trigger_word", "war"}},
                })}};
    json script{{"chat", json::array({json{{"template", "supplement.v1"}, {"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);

    std::vector<EventTypeRecord> types{
        test::make_type("Attack_1", "Attack", "violent action"),
        test::make_type("Response_1", "Response", "reaction to events"),
        test::make_type("NotLatent_1", "NotLatent", "unrelated")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "How is the world reacting to the war in Iraq?",
                              {{"war", "Attack_1", TriggerOrigin::OriginalGold}});
    LatentTypeSet latent;
    latent.doc_id = "d1";
    latent.types["Response_1"] = {"probe", 0.9, LatentRule::Threshold};

    AnnotatorConfig config{"m", "e", 5, 0.8, 0.1};
    auto supplements = supplement_annotations(doc, latent, ontology, gateway, config, "r1");
    REQUIRE(supplements.size() == 1);
    CHECK(supplements[0].mention == "Reacting");  // surface form kept
    CHECK(supplements[0].type_id == "Response_1");
    CHECK(supplements[0].origin == TriggerOrigin::Supplementary);
}

TEST_CASE("empty latent set short-circuits without a provider call") {
    TempDir dir;
    json script = json::object();  // any chat would fail
    auto gateway = test::make_mock_gateway(dir, script);
    std::vector<EventTypeRecord> types{test::make_type("Attack_1", "Attack", "x")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "text");
    AnnotatorConfig config{"m", "e", 5, 0.8, 0.1};
    CHECK(supplement_annotations(doc, {}, ontology, gateway, config, "r1").empty());
    CHECK(gateway.ledger().total().requests == 0);
}

TEST_CASE("supplements never duplicate gold triggers") {
    TempDir dir;
    json reply{{"text_analysis", "a"},
               {"supplemented_annotations",
                json::array({json{{"event_type", "Attack_2"}, {"trigger_word", "The War"}}})}};
    json script{{"chat", json::array({json{{"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    std::vector<EventTypeRecord> types{test::make_type("Attack_1", "Attack", "x"),
                                       test::make_type("Attack_2", "Attack", "y")};
    OntologyIndex ontology(types);

    // Same normalized mention + same type -> duplicate; different type -> kept.
    auto doc = test::make_doc("d1", "the war goes on",
                              {{"the war", "Attack_2", TriggerOrigin::OriginalGold}});
    LatentTypeSet latent;
    latent.doc_id = "d1";
    latent.types["Attack_2"] = {"p", 0.9, LatentRule::Threshold};
    AnnotatorConfig config{"m", "e", 5, 0.8, 0.1};
    CHECK(supplement_annotations(doc, latent, ontology, gateway, config, "r1").empty());
}

TEST_CASE("run_round composes the stages and bounds failures") {
    TempDir dir;
    LatentFixture fixture;
    json script = fixture.script;
    json propose_reply{{"text_analysis", "x"},
                       {"possible_event_types",
                        json::array({json{{"event_type", "probe"},
                                          {"detailed_definition", "probe definition"}}})}};
    json supplement_reply{{"text_analysis", "x"},
                          {"supplemented_annotations",
                           json::array({json{{"event_type", "B_1"},
                                             {"trigger_word", "skirmish"}}})}};
    script["chat"] = json::array({
        json{{"template", "propose.v1"}, {"reply", propose_reply}},
        json{{"template", "supplement.v1"}, {"reply", supplement_reply}},
    });
    auto gateway = test::make_mock_gateway(dir, script);
    OntologyIndex ontology(fixture.ontology);
    auto embeddings = embed_definitions(fixture.ontology, gateway, "embedder");

    std::vector<DocumentRecord> corpus{
        test::make_doc("d1", "a skirmish broke out"),
        test::make_doc("d2", "another skirmish here"),
        test::make_doc("d3", "no mention of it")};
    AnnotatorConfig config{"m", "embedder", 5, 0.8, 0.1};

    auto round = run_round(corpus, ontology, embeddings, 1, gateway, config);
    CHECK(round.round_index == 1);
    REQUIRE(round.supplements.size() == 3);
    CHECK(round.supplements.at("d1").size() == 1);
    CHECK(round.supplements.at("d1")[0].mention == "skirmish");
    CHECK(round.supplements.at("d3").empty());  // hallucinated mention dropped

    SUBCASE("round files round-trip") {
        auto path = dir / "round_1.jsonl";
        save_round(path, round);
        auto loaded = load_round(path, 1);
        CHECK(loaded.supplements == round.supplements);
    }
}

TEST_CASE("run_round fails once errors cross the configured fraction") {
    TempDir dir;
    // Documents 8 and 9 get an unparseable propose reply; the rest see none.
    json empty_reply{{"text_analysis", "x"}, {"possible_event_types", json::array()}};
    json script{{"chat", json::array({
                            json{{"template", "propose.v1"},
                                 {"contains", "doc content 8"},
                                 {"reply", "broken"}},
                            json{{"template", "propose.v1"},
                                 {"contains", "doc content 9"},
                                 {"reply", "broken"}},
                            json{{"template", "propose.v1"}, {"reply", empty_reply}},
                        })}};
    auto gateway = test::make_mock_gateway(dir, script);
    std::vector<EventTypeRecord> types{test::make_type("A_1", "A", "def")};
    OntologyIndex ontology(types);
    auto embeddings = embed_definitions(types, gateway, "e");

    std::vector<DocumentRecord> corpus;
    for (int i = 0; i < 10; ++i) {
        corpus.push_back(test::make_doc("d" + std::to_string(i),
                                        "doc content " + std::to_string(i)));
    }
    // 2 of 10 over the 10% threshold -> RoundError.
    AnnotatorConfig config{"m", "e", 5, 0.8, 0.1};
    CHECK_THROWS_AS(run_round(corpus, ontology, embeddings, 1, gateway, config), RoundError);

    // A laxer threshold tolerates the same two failures.
    config.max_error_fraction = 0.2;
    auto round = run_round(corpus, ontology, embeddings, 1, gateway, config);
    CHECK(round.supplements.size() == 10);
}
