#include <doctest.h>

#include <random>

#include "errors.hpp"
#include "text.hpp"

using namespace seoe;

TEST_CASE("normalize_mention trims, collapses, and case-folds") {
    CHECK(normalize_mention("  launched ") == "launched");
    CHECK(normalize_mention("Raping And   Drugging") == "raping and drugging");
    CHECK(normalize_mention("war") == "war");
    CHECK(normalize_mention("The\tWar\n") == "the war");
}

TEST_CASE("normalize_mention rejects empty results") {
    CHECK_THROWS_AS(normalize_mention("   "), EmptyMentionError);
    CHECK_THROWS_AS(normalize_mention(""), EmptyMentionError);
    CHECK_THROWS_AS(normalize_mention("\t\n"), EmptyMentionError);
}

TEST_CASE("normalize_mention is idempotent") {
    std::mt19937 rng(42);
    const std::string alphabet = "aA Zz .!?\t 09-";
    for (int i = 0; i < 500; ++i) {
        std::string raw;
        int len = 1 + static_cast<int>(rng() % 24);
        for (int c = 0; c < len; ++c) raw.push_back(alphabet[rng() % alphabet.size()]);
        std::string once;
        try {
            once = normalize_mention(raw);
        } catch (const EmptyMentionError&) {
            continue;
        }
        CHECK(normalize_mention(once) == once);
        CHECK(is_normalized(once));
    }
}

TEST_CASE("whitespace token counting") {
    CHECK(whitespace_token_count("") == 0);
    CHECK(whitespace_token_count("   ") == 0);
    CHECK(whitespace_token_count("one") == 1);
    CHECK(whitespace_token_count("How is the world reacting to the war in Iraq?") == 10);
    CHECK(whitespace_token_count("  a\tb \n c ") == 3);
    CHECK(whitespace_tokens("a b  c").size() == 3);
}

TEST_CASE("sentence counting") {
    CHECK(sentence_count("") == 0);
    CHECK(sentence_count("Hi. There!") == 2);
    CHECK(sentence_count("a.b") == 1);          // no boundary inside a token
    CHECK(sentence_count("Hello! How are you? Good.") == 3);
    CHECK(sentence_count("One. Two") == 2);     // trailing unterminated chunk
    CHECK(sentence_count("Wait...") == 1);
    CHECK(sentence_count("Only words no punct") == 1);
}
