#include <doctest.h>

#include "errors.hpp"
#include "inference.hpp"
#include "prompts.hpp"
#include "support.hpp"

using namespace seoe;
using test::TempDir;

namespace {

BenchmarkRelease iraq_release() {
    BenchmarkRelease release;
    release.ontology = {
        test::make_type("Conflict:Attack_1", "Conflict:Attack",
                        "An aggressive action perpetrated by an attacker."),
        test::make_type("Response_1", "Response", "A reaction to prior events.")};
    release.documents = {
        test::make_doc("iraq", "How is the world reacting to the war in Iraq?",
                       {{"war", "Conflict:Attack_1", TriggerOrigin::OriginalGold},
                        {"reacting", "Response_1", TriggerOrigin::OriginalGold}})};
    release.nucleus_p = 0.5;
    release.rounds = 10;
    return release;
}

json good_reply() {
    return json{{"Text Analysis", "The text asks about global reaction to a war."},
                {"Event Type Generation",
                 json{{"Global Response", "How the world responds to a major event."}}},
                {"Extraction Results",
                 json::array({json{{"Trigger Span", "reacting"},
                                   {"Event Type", "Global Response"}}})}};
}

}  // namespace

TEST_CASE("run_inference parses extractions into prediction records") {
    TempDir dir;
    json script{{"chat", json::array({json{{"template", "infer.v1"},
                                           {"reply", good_reply()}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    auto release = iraq_release();

    auto predictions = run_inference(release, {"gpt-4o-mock", 2048}, gateway);
    REQUIRE(predictions.size() == 1);
    const auto& pred = predictions[0];
    CHECK(pred.doc_id == "iraq");
    REQUIRE(pred.triggers.size() == 1);
    CHECK(pred.triggers[0].mention == "reacting");
    CHECK(pred.triggers[0].type_id == "Global Response");
    CHECK(pred.triggers[0].origin == TriggerOrigin::Predicted);
    CHECK(pred.generated_definitions.at("Global Response") ==
          "How the world responds to a major event.");
    CHECK_FALSE(pred.raw_model_output.empty());
    CHECK_FALSE(pred.parse_failed);
}

TEST_CASE("extractions with undeclared types or absent mentions are dropped") {
    TempDir dir;
    json reply{{"Text Analysis", "x"},
               {"Event Type Generation", json{{"Known", "a description"}}},
               {"Extraction Results",
                json::array({
                    json{{"Trigger Span", "war"}, {"Event Type", "Undeclared"}},
                    json{{"Trigger Span", "missing words"}, {"Event Type", "Known"}},
                    json{{"Trigger Span", "war"}, {"Event Type", "Known"}},
                })}};
    json script{{"chat", json::array({json{{"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    auto release = iraq_release();

    auto predictions = run_inference(release, {"m", 2048}, gateway);
    REQUIRE(predictions[0].triggers.size() == 1);
    CHECK(predictions[0].triggers[0].type_id == "Known");
}

TEST_CASE("empty extraction results are a valid zero-trigger record") {
    TempDir dir;
    json reply{{"Text Analysis", "nothing"},
               {"Event Type Generation", json::object()},
               {"Extraction Results", json::array()}};
    json script{{"chat", json::array({json{{"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    auto predictions = run_inference(iraq_release(), {"m", 2048}, gateway);
    REQUIRE(predictions.size() == 1);
    CHECK(predictions[0].triggers.empty());
    CHECK_FALSE(predictions[0].parse_failed);
}

TEST_CASE("unparseable replies flag the document and fill the failure manifest") {
    TempDir dir;
    json script{{"chat", json::array({json{{"reply", "no json here"}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    std::vector<InferenceFailure> failures;
    auto predictions = run_inference(iraq_release(), {"m", 2048}, gateway, &failures);
    REQUIRE(predictions.size() == 1);
    CHECK(predictions[0].parse_failed);
    CHECK(predictions[0].triggers.empty());
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].doc_id == "iraq");
    // Original plus the format-reminder retry.
    CHECK(gateway.ledger().stage("infer.v1").requests == 2);
}

TEST_CASE("inference prompts never leak benchmark gold information") {
    auto release = iraq_release();
    for (const auto& doc : release.documents) {
        auto prompt = prompts::render_inference_prompt(doc.text);
        for (const auto& type : release.ontology) {
            CHECK(prompt.find(type.type_id) == std::string::npos);
            if (type.definition) {
                CHECK(prompt.find(type.definition->text) == std::string::npos);
            }
        }
        CHECK(prompt.find(doc.text) != std::string::npos);
    }
}

TEST_CASE("inference is deterministic under the mock") {
    TempDir dir;
    json script{{"chat", json::array({json{{"reply", good_reply()}}})}};
    auto gateway = test::make_mock_gateway(dir, script);
    auto release = iraq_release();
    auto a = run_inference(release, {"m", 2048}, gateway);
    auto b = run_inference(release, {"m", 2048}, gateway);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].triggers == b[0].triggers);
    CHECK(a[0].raw_model_output == b[0].raw_model_output);
}

TEST_CASE("prediction_stats") {
    std::vector<PredictionRecord> preds(3);
    preds[0].triggers.resize(2);
    preds[1].triggers.resize(4);
    preds[2].triggers.resize(6);
    auto stats = prediction_stats(preds);
    CHECK(stats.mean_triggers_per_doc == doctest::Approx(4.0));
    CHECK(stats.parse_failure_rate == doctest::Approx(0.0));

    SUBCASE("zero records flagged") {
        auto empty = prediction_stats(std::vector<PredictionRecord>{});
        CHECK(empty.documents == 0);
        CHECK(empty.mean_triggers_per_doc == 0.0);
    }
    SUBCASE("failure rate and definition length") {
        preds[1].parse_failed = true;
        preds[0].generated_definitions["T"] = "three word definition";
        auto s = prediction_stats(preds);
        CHECK(s.parse_failure_rate == doctest::Approx(1.0 / 3.0));
        CHECK(s.mean_definition_word_count == doctest::Approx(3.0));
    }
}
