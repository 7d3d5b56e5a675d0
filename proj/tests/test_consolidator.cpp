#include <doctest.h>

#include <cmath>
#include <random>

#include "consolidator.hpp"
#include "errors.hpp"
#include "support.hpp"

using namespace seoe;
using test::TempDir;

namespace {

TriggerAnnotation supp(const std::string& mention, const std::string& type_id) {
    return {mention, type_id, TriggerOrigin::Supplementary};
}

// Rounds over a single document; presence[i] lists the triggers of round i+1.
std::vector<AnnotationRound> rounds_for(
    const std::string& doc_id, const std::vector<std::vector<TriggerAnnotation>>& presence) {
    std::vector<AnnotationRound> rounds;
    for (std::size_t i = 0; i < presence.size(); ++i) {
        AnnotationRound round;
        round.round_index = static_cast<int>(i) + 1;
        round.supplements[doc_id] = presence[i];
        rounds.push_back(std::move(round));
    }
    return rounds;
}

std::vector<TriggerStat> stats_from_counts(const std::vector<std::pair<std::string, int>>& counts) {
    int total = 0;
    for (const auto& [_, c] : counts) total += c;
    std::vector<TriggerStat> stats;
    for (const auto& [mention, count] : counts) {
        TriggerStat stat;
        stat.trigger = supp(mention, "T_1");
        stat.mention_norm = mention;
        stat.count = count;
        stat.relative_frequency = static_cast<double>(count) / total;
        stats.push_back(std::move(stat));
    }
    return stats;
}

std::set<std::string> mentions_of(const std::vector<TriggerStat>& stats) {
    std::set<std::string> out;
    for (const auto& s : stats) out.insert(s.mention_norm);
    return out;
}

}  // namespace

TEST_CASE("tally counts rounds containing each trigger") {
    // t1 in 9 rounds, t2 in 6, t3 in 3, t4 in 2 -> total 20.
    std::vector<std::vector<TriggerAnnotation>> presence(10);
    for (int i = 0; i < 9; ++i) presence[i].push_back(supp("t1", "A_1"));
    for (int i = 0; i < 6; ++i) presence[i].push_back(supp("t2", "A_1"));
    for (int i = 0; i < 3; ++i) presence[i].push_back(supp("t3", "A_1"));
    for (int i = 0; i < 2; ++i) presence[i].push_back(supp("t4", "A_1"));
    auto table = tally(rounds_for("d1", presence));
    CHECK(table.rounds == 10);
    const auto& stats = table.per_doc.at("d1");
    REQUIRE(stats.size() == 4);
    std::map<std::string, double> freq;
    for (const auto& s : stats) freq[s.mention_norm] = s.relative_frequency;
    CHECK(freq["t1"] == doctest::Approx(0.45));
    CHECK(freq["t2"] == doctest::Approx(0.30));
    CHECK(freq["t3"] == doctest::Approx(0.15));
    CHECK(freq["t4"] == doctest::Approx(0.10));
}

TEST_CASE("tally degenerate cases") {
    SUBCASE("single round, single trigger") {
        auto table = tally(rounds_for("d1", {{supp("only", "A_1")}}));
        CHECK(table.per_doc.at("d1")[0].relative_frequency == doctest::Approx(1.0));
    }
    SUBCASE("two ever-present triggers share the mass") {
        std::vector<std::vector<TriggerAnnotation>> presence(
            10, {supp("x", "A_1"), supp("y", "A_1")});
        auto table = tally(rounds_for("d1", presence));
        for (const auto& s : table.per_doc.at("d1")) {
            CHECK(s.count == 10);
            CHECK(s.relative_frequency == doctest::Approx(0.5));
        }
    }
    SUBCASE("case variants of one mention merge") {
        auto table =
            tally(rounds_for("d1", {{supp("War", "A_1")}, {supp("war", "A_1")}}));
        REQUIRE(table.per_doc.at("d1").size() == 1);
        CHECK(table.per_doc.at("d1")[0].count == 2);
        CHECK(table.per_doc.at("d1")[0].trigger.mention == "War");  // first surface kept
    }
    SUBCASE("mismatched corpora are rejected") {
        AnnotationRound r1;
        r1.round_index = 1;
        r1.supplements["d1"] = {};
        AnnotationRound r2;
        r2.round_index = 2;
        r2.supplements["other"] = {};
        std::vector<AnnotationRound> rounds{r1, r2};
        CHECK_THROWS_AS(tally(rounds), ValidationError);
    }
    SUBCASE("at least one round required") {
        std::vector<AnnotationRound> none;
        CHECK_THROWS_AS(tally(none), ValidationError);
    }
}

TEST_CASE("nucleus_select_doc picks the shortest covering prefix") {
    auto stats = stats_from_counts({{"t1", 9}, {"t2", 6}, {"t3", 3}, {"t4", 2}});
    CHECK(mentions_of(nucleus_select_doc(stats, 0.5)) ==
          std::set<std::string>{"t1", "t2"});
    CHECK(mentions_of(nucleus_select_doc(stats, 0.3)) == std::set<std::string>{"t1"});
    CHECK(mentions_of(nucleus_select_doc(stats, 0.9)) ==
          std::set<std::string>{"t1", "t2", "t3"});
    CHECK(nucleus_select_doc(stats, 1.0).size() == 4);
    CHECK_THROWS_AS(nucleus_select_doc(stats, 0.0), ValidationError);
    CHECK_THROWS_AS(nucleus_select_doc(stats, 1.5), ValidationError);
}

TEST_CASE("identical rounds yield a uniform distribution and prefix selection") {
    // Four triggers present in every one of five rounds: mass 1/4 each, so a
    // cut at p selects exactly ceil(4p) triggers; a single trigger survives
    // any p.
    std::vector<TriggerAnnotation> everything{supp("a", "T_1"), supp("b", "T_1"),
                                              supp("c", "T_1"), supp("d", "T_1")};
    std::vector<std::vector<TriggerAnnotation>> presence(5, everything);
    auto table = tally(rounds_for("d1", presence));
    const auto& stats = table.per_doc.at("d1");
    for (double p : {0.1, 0.25, 0.26, 0.5, 0.75, 0.8, 1.0}) {
        auto selected = nucleus_select_doc(stats, p);
        CHECK(selected.size() == static_cast<std::size_t>(std::ceil(4 * p - 1e-12)));
    }

    auto single = tally(rounds_for("d1", {{supp("only", "T_1")}, {supp("only", "T_1")}}));
    for (double p : {0.001, 0.5, 1.0}) {
        CHECK(nucleus_select_doc(single.per_doc.at("d1"), p).size() == 1);
    }
}

TEST_CASE("nucleus selection is monotone in p and exact at the oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng() % 12;
        std::vector<std::pair<std::string, int>> counts;
        for (std::size_t i = 0; i < n; ++i) {
            counts.push_back({"m" + std::to_string(i), 1 + static_cast<int>(rng() % 10)});
        }
        auto stats = stats_from_counts(counts);
        double p1 = (1 + rng() % 1000) / 1000.0;
        double p2 = (1 + rng() % 1000) / 1000.0;
        if (p1 > p2) std::swap(p1, p2);
        auto s1 = mentions_of(nucleus_select_doc(stats, p1));
        auto s2 = mentions_of(nucleus_select_doc(stats, p2));
        CHECK(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));
        CHECK(nucleus_select_doc(stats, 1.0).size() == stats.size());

        // Independent prefix-sum oracle over the documented ordering.
        auto sorted = stats;
        std::sort(sorted.begin(), sorted.end(), [](const TriggerStat& a, const TriggerStat& b) {
            if (a.count != b.count) return a.count > b.count;
            if (a.mention_norm != b.mention_norm) return a.mention_norm < b.mention_norm;
            return a.trigger.type_id < b.trigger.type_id;
        });
        std::set<std::string> oracle;
        double cumulative = 0.0;
        for (const auto& s : sorted) {
            oracle.insert(s.mention_norm);
            cumulative += s.relative_frequency;
            if (cumulative >= p1) break;
        }
        CHECK(s1 == oracle);
    }
}

TEST_CASE("propose_duplicate_groups uses containment and group-token rules") {
    GroupSet groups;
    groups.groups = {{"X_1", "Y_1"}, {"Z_1"}};
    groups.index = {{"X_1", 0}, {"Y_1", 0}, {"Z_1", 1}};

    SUBCASE("containment chains one component") {
        std::vector<TriggerStat> selected = stats_from_counts({});
        auto add = [&](const std::string& mention, const std::string& type) {
            TriggerStat s;
            s.trigger = supp(mention, type);
            s.mention_norm = mention;
            s.count = 1;
            s.relative_frequency = 0.25;
            selected.push_back(s);
        };
        add("claiming fraud", "X_1");
        add("claiming fraud", "Y_1");
        add("fraud", "X_1");
        auto result = propose_duplicate_groups("d1", selected, std::vector<TriggerAnnotation>{}, groups);
        REQUIRE(result.size() == 1);
        CHECK(result[0].members.size() == 3);
    }
    SUBCASE("containment alone groups same-type variants") {
        auto selected = stats_from_counts({});
        TriggerStat a;
        a.trigger = supp("war", "A_1");
        a.mention_norm = "war";
        a.count = 2;
        TriggerStat b;
        b.trigger = supp("the war", "A_1");
        b.mention_norm = "the war";
        b.count = 1;
        selected = {a, b};
        auto result = propose_duplicate_groups("d1", selected, std::vector<TriggerAnnotation>{}, groups);
        REQUIRE(result.size() == 1);
        CHECK(result[0].members.size() == 2);
    }
    SUBCASE("disjoint mentions in different groups never pair") {
        TriggerStat a;
        a.trigger = supp("election", "X_1");
        a.mention_norm = "election";
        TriggerStat b;
        b.trigger = supp("storm", "Z_1");
        b.mention_norm = "storm";
        std::vector<TriggerStat> selected{a, b};
        CHECK(propose_duplicate_groups("d1", selected, std::vector<TriggerAnnotation>{}, groups).empty());
    }
    SUBCASE("same group plus shared token pairs distinct mentions") {
        TriggerStat a;
        a.trigger = supp("vote fraud", "X_1");
        a.mention_norm = "vote fraud";
        TriggerStat b;
        b.trigger = supp("fraud claims", "Y_1");
        b.mention_norm = "fraud claims";
        std::vector<TriggerStat> selected{a, b};
        auto result = propose_duplicate_groups("d1", selected, std::vector<TriggerAnnotation>{}, groups);
        REQUIRE(result.size() == 1);
    }
}

TEST_CASE("merge_duplicates honors the judge and falls back safely") {
    TempDir dir;
    std::vector<EventTypeRecord> types{test::make_type("A_1", "A", "def a")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "the war goes on and on");

    auto selected = std::vector<TriggerStat>{};
    auto add = [&](const std::string& mention, int count) {
        TriggerStat s;
        s.trigger = supp(mention, "A_1");
        s.mention_norm = mention;
        s.count = count;
        s.relative_frequency = 0.5;
        selected.push_back(s);
    };
    add("war", 9);
    add("the war", 3);

    GroupSet groups;  // containment rule alone forms the duplicate group
    auto dup = propose_duplicate_groups("d1", selected, doc.gold_events, groups);
    REQUIRE(dup.size() == 1);

    SUBCASE("judge picks a member") {
        json reply{{"Text Analysis", "a"},
                   {"Group Analysis", json::array({"keep war"})},
                   {"Merged Triggers",
                    json::array({json{{"Trigger Span", "war"}, {"Event Type", "A_1"}}})}};
        json script{{"chat", json::array({json{{"template", "merge.v1"}, {"reply", reply}}})}};
        auto gateway = test::make_mock_gateway(dir, script);
        auto retained = merge_duplicates(doc, selected, dup, ontology, gateway, {"m"});
        REQUIRE(retained.size() == 1);
        CHECK(retained[0].mention == "war");
    }
    SUBCASE("non-member reply falls back to the highest-frequency member") {
        json reply{{"Text Analysis", "a"},
                   {"Group Analysis", json::array()},
                   {"Merged Triggers",
                    json::array({json{{"Trigger Span", "peace"}, {"Event Type", "A_1"}}})}};
        json script{{"chat", json::array({json{{"reply", reply}}})}};
        auto gateway = test::make_mock_gateway(dir, script);
        auto retained = merge_duplicates(doc, selected, dup, ontology, gateway, {"m"});
        REQUIRE(retained.size() == 1);
        CHECK(retained[0].mention == "war");  // count 9 beats 3
    }
    SUBCASE("unparseable replies fall back too") {
        json script{{"chat", json::array({json{{"reply", "not a dict at all"}}})}};
        auto gateway = test::make_mock_gateway(dir, script);
        auto retained = merge_duplicates(doc, selected, dup, ontology, gateway, {"m"});
        REQUIRE(retained.size() == 1);
        CHECK(retained[0].mention == "war");
    }
    SUBCASE("zero groups pass everything through") {
        TempDir dir2;
        auto gateway = test::make_mock_gateway(dir2, json::object());
        auto retained = merge_duplicates(doc, selected, std::vector<DuplicateGroup>{}, ontology, gateway, {"m"});
        CHECK(retained.size() == 2);
        CHECK(gateway.ledger().total().requests == 0);
    }
}

TEST_CASE("merge is idempotent once duplicates are resolved") {
    TempDir dir;
    std::vector<EventTypeRecord> types{test::make_type("A_1", "A", "def a")};
    OntologyIndex ontology(types);
    auto doc = test::make_doc("d1", "the war goes on");
    std::vector<TriggerStat> selected;
    TriggerStat a;
    a.trigger = supp("war", "A_1");
    a.mention_norm = "war";
    a.count = 9;
    TriggerStat b;
    b.trigger = supp("the war", "A_1");
    b.mention_norm = "the war";
    b.count = 2;
    selected = {a, b};

    json reply{{"Text Analysis", "x"},
               {"Group Analysis", json::array()},
               {"Merged Triggers",
                json::array({json{{"Trigger Span", "war"}, {"Event Type", "A_1"}}})}};
    json script{{"chat", json::array({json{{"reply", reply}}})}};
    auto gateway = test::make_mock_gateway(dir, script);

    GroupSet groups;
    auto first_groups = propose_duplicate_groups("d1", selected, std::vector<TriggerAnnotation>{}, groups);
    auto once = merge_duplicates(doc, selected, first_groups, ontology, gateway, {"m"});
    REQUIRE(once.size() == 1);

    // Re-run over the retained set: no duplicate groups remain, so the second
    // pass is the identity.
    std::vector<TriggerStat> retained_stats;
    TriggerStat r;
    r.trigger = once[0];
    r.mention_norm = "war";
    r.count = 9;
    retained_stats = {r};
    auto second_groups = propose_duplicate_groups("d1", retained_stats, std::vector<TriggerAnnotation>{}, groups);
    CHECK(second_groups.empty());
    auto twice =
        merge_duplicates(doc, retained_stats, second_groups, ontology, gateway, {"m"});
    CHECK(twice == once);
}

TEST_CASE("assemble_release unions gold with merged supplements") {
    TempDir dir;
    std::vector<EventTypeRecord> types{test::make_type("A_1", "A", "def a"),
                                       test::make_type("B_1", "B", "def b")};
    std::vector<DocumentRecord> corpus{
        test::make_doc("d1", "a war and a response happened",
                       {{"war", "A_1", TriggerOrigin::OriginalGold}})};

    // Round 1+2 agree on "response"; round 2 alone adds "happened".
    std::vector<AnnotationRound> rounds = rounds_for(
        "d1", {{supp("response", "B_1")}, {supp("response", "B_1"), supp("happened", "B_1")}});

    json script{{"chat", json::array()}};  // merge never called: no duplicate groups
    auto gateway = test::make_mock_gateway(dir, script);

    ReleaseInputs inputs;
    inputs.corpus = corpus;
    inputs.ontology = types;
    inputs.rounds = rounds;
    inputs.nucleus_p = 0.5;

    auto release = assemble_release(inputs, gateway, {"m"});
    REQUIRE(release.documents.size() == 1);
    // Selection at p=0.5: response (2/3) alone covers it.
    REQUIRE(release.documents[0].gold_events.size() == 2);
    CHECK(release.documents[0].gold_events[0].mention == "war");
    CHECK(release.documents[0].gold_events[1].mention == "response");
    CHECK(release.documents[0].gold_events[1].origin == TriggerOrigin::Supplementary);
    CHECK(release.nucleus_p == 0.5);
    CHECK(release.rounds == 2);

    SUBCASE("p monotonicity: higher p keeps a superset per document") {
        inputs.nucleus_p = 0.7;
        auto wider = assemble_release(inputs, gateway, {"m"});
        CHECK(wider.documents[0].gold_events.size() >=
              release.documents[0].gold_events.size());
        CHECK(wider.documents[0].gold_events.size() == 3);
    }
    SUBCASE("zero rounds reproduce the input corpus") {
        inputs.rounds = {};
        auto identity = assemble_release(inputs, gateway, {"m"});
        CHECK(identity.documents[0].gold_events.size() == 1);
    }
    SUBCASE("event counts never decrease") {
        CHECK(release.documents[0].gold_events.size() >= corpus[0].gold_events.size());
    }
}

TEST_CASE("selection files round-trip") {
    TempDir dir;
    std::map<std::string, std::vector<TriggerStat>> selection;
    TriggerStat s;
    s.trigger = supp("response", "B_1");
    s.mention_norm = "response";
    s.count = 7;
    s.relative_frequency = 0.7;
    selection["d1"] = {s};
    auto path = dir / "selected.jsonl";
    save_selection(path, selection, 10, 0.5);
    auto loaded = load_selection(path);
    CHECK(loaded.rounds == 10);
    CHECK(loaded.p == 0.5);
    REQUIRE(loaded.per_doc.at("d1").size() == 1);
    CHECK(loaded.per_doc.at("d1")[0].count == 7);
    CHECK(loaded.per_doc.at("d1")[0].trigger.mention == "response");
}
