#include <doctest.h>

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "integrator.hpp"
#include "support.hpp"

using namespace seoe;
using test::TempDir;

namespace {

SourceSet make_source(const std::string& name, std::vector<std::string> display_names) {
    SourceSet source;
    source.name = name;
    for (const auto& dn : display_names) {
        source.ontology.push_back(test::make_type(dn, dn));
    }
    return source;
}

}  // namespace

TEST_CASE("integrate_ontologies adds serial suffixes per display name") {
    std::vector<SourceSet> sources{make_source("ace", {"Conflict:Attack", "Life:Die"}),
                                   make_source("rams", {"Conflict:Attack"})};
    auto merged = integrate_ontologies(sources);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0].type_id == "Conflict:Attack_1");
    CHECK(merged[0].source_dataset == "ace");
    CHECK(merged[1].type_id == "Life:Die_1");
    CHECK(merged[2].type_id == "Conflict:Attack_2");
    CHECK(merged[2].source_dataset == "rams");
    CHECK(merged[2].serial_suffix == 2);
}

TEST_CASE("single source still gets the _1 suffix") {
    std::vector<SourceSet> sources{make_source("only", {"Reporting"})};
    auto merged = integrate_ontologies(sources);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].type_id == "Reporting_1");
}

TEST_CASE("many sources merge into the union of their typed entries") {
    std::vector<SourceSet> sources;
    for (int s = 0; s < 12; ++s) {
        std::vector<std::string> names;
        for (int t = 0; t < 47; ++t) {
            names.push_back("S" + std::to_string(s) + ":Type" + std::to_string(t));
        }
        sources.push_back(make_source("src" + std::to_string(s), names));
    }
    auto merged = integrate_ontologies(sources);
    CHECK(merged.size() == 564);
    validate_ontology(merged);
}

TEST_CASE("duplicate type_id within one source is rejected") {
    SourceSet source = make_source("bad", {"A"});
    source.ontology.push_back(test::make_type("A", "A different name"));
    std::vector<SourceSet> sources{std::move(source)};
    CHECK_THROWS_AS(integrate_ontologies(sources), ValidationError);
}

TEST_CASE("integration preserves (display_name, source_dataset) pairs") {
    std::vector<SourceSet> forward{make_source("s1", {"A", "B"}),
                                   make_source("s2", {"B", "C"})};
    std::vector<SourceSet> reversed{forward[1], forward[0]};
    auto pairs_of = [](const std::vector<EventTypeRecord>& types) {
        std::multiset<std::pair<std::string, std::string>> pairs;
        for (const auto& t : types) pairs.insert({t.display_name, t.source_dataset});
        return pairs;
    };
    CHECK(pairs_of(integrate_ontologies(forward)) == pairs_of(integrate_ontologies(reversed)));
}

TEST_CASE("integrate remaps document gold type ids") {
    std::vector<SourceSet> sources{make_source("ace", {"Attack"}),
                                   make_source("rams", {"Attack"})};
    sources[0].corpus.push_back(
        test::make_doc("a1", "a war", {{"war", "Attack", TriggerOrigin::OriginalGold}}));
    sources[1].corpus.push_back(
        test::make_doc("r1", "a raid", {{"raid", "Attack", TriggerOrigin::OriginalGold}}));
    IntegrationPlan plan{std::move(sources), 10};
    auto result = integrate(plan);
    REQUIRE(result.corpus.size() == 2);
    CHECK(result.corpus[0].gold_events[0].type_id == "Attack_1");
    CHECK(result.corpus[1].gold_events[0].type_id == "Attack_2");
}

TEST_CASE("sample_corpus fully includes scarce types") {
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 3; ++i) {
        docs.push_back(test::make_doc("rare" + std::to_string(i), "rare text",
                                      {{"x", "Rare_1", TriggerOrigin::OriginalGold}}));
    }
    auto sampled = sample_corpus(docs, 10, 7);
    CHECK(sampled.size() == 3);

    std::vector<std::string> warnings;
    sample_corpus(docs, 10, 7, &warnings);
    REQUIRE(warnings.size() == 1);  // coverage 3 < quota 10
    CHECK(warnings[0].find("Rare_1") != std::string::npos);
}

TEST_CASE("sample_corpus stops admitting a plentiful single-type document at quota") {
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 500; ++i) {
        docs.push_back(test::make_doc("d" + std::to_string(i), "busy text",
                                      {{"x", "Common_1", TriggerOrigin::OriginalGold}}));
    }
    auto sampled = sample_corpus(docs, 10, 3);
    CHECK(sampled.size() == 10);  // every admission counts toward the one type
}

TEST_CASE("sample_corpus is deterministic per seed") {
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 60; ++i) {
        std::vector<TriggerAnnotation> gold;
        gold.push_back({"t", "T" + std::to_string(i % 6) + "_1", TriggerOrigin::OriginalGold});
        if (i % 3 == 0) {
            gold.push_back({"u", "U_1", TriggerOrigin::OriginalGold});
        }
        docs.push_back(test::make_doc("d" + std::to_string(i), "word word", std::move(gold)));
    }
    auto a = sample_corpus(docs, 4, 99);
    auto b = sample_corpus(docs, 4, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].doc_id == b[i].doc_id);

    // Admitted coverage reaches the quota for every type frequent enough.
    std::map<std::string, int> coverage;
    for (const auto& doc : a) {
        std::set<std::string> types;
        for (const auto& t : doc.gold_events) types.insert(t.type_id);
        for (const auto& t : types) ++coverage[t];
    }
    for (const auto& [type_id, count] : coverage) {
        INFO(type_id);
        CHECK(count >= 4);
    }
}

TEST_CASE("collect_examples caps at three per type") {
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 5; ++i) {
        docs.push_back(test::make_doc("d" + std::to_string(i), "war in text",
                                      {{"war", "Attack_1", TriggerOrigin::OriginalGold}}));
    }
    auto examples = collect_examples(docs);
    REQUIRE(examples.count("Attack_1"));
    CHECK(examples.at("Attack_1").size() == 3);
}

TEST_CASE("generate_definitions attaches definitions through the gateway") {
    TempDir dir;
    json reply{{"event_type", "Conflict:Attack"},
               {"detailed_definition", "An aggressive action intended to cause harm."}};
    json script{{"chat", json::array({json{{"template", "define.v1"},
                                           {"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);

    std::vector<EventTypeRecord> ontology{
        test::make_type("Conflict:Attack_1", "Conflict:Attack", "", {"Attacker", "Target"})};
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> examples{
        {"Conflict:Attack_1", {{"the enemy launched rounds at us", "launched"}}}};
    generate_definitions(ontology, examples, gateway, "gpt-4o-mock");

    REQUIRE(ontology[0].definition.has_value());
    CHECK(ontology[0].definition->text ==
          "An aggressive action intended to cause harm.");
    CHECK(ontology[0].definition->word_count == 7);
    CHECK(ontology[0].definition->generator == "gpt-4o-mock/define.v1");

    // Coverage: no nulls remain.
    for (const auto& t : ontology) CHECK(t.definition.has_value());
}

TEST_CASE("definition replies echoing the wrong type fail after one retry") {
    TempDir dir;
    json wrong{{"event_type", "Other:Type"}, {"detailed_definition", "wrong"}};
    json script{{"chat", json::array({json{{"reply", wrong}}})}};
    auto gateway = test::make_mock_gateway(dir, script);

    std::vector<EventTypeRecord> ontology{test::make_type("Attack_1", "Attack")};
    CHECK_THROWS_AS(generate_definitions(ontology, {}, gateway, "m"), DefinitionError);
    // Both the original and the retry key were attempted.
    CHECK(gateway.ledger().stage("define.v1").requests == 2);
}
