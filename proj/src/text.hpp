#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace seoe {

// Trimmed, internal whitespace collapsed to single spaces, ASCII case-folded.
// Idempotent. Throws EmptyMentionError when nothing remains.
std::string normalize_mention(std::string_view raw);

// Same folding as normalize_mention but an empty result is allowed. Used to
// normalize document text before substring membership checks.
std::string normalize_text(std::string_view raw);

bool is_normalized(std::string_view s);

std::vector<std::string> whitespace_tokens(std::string_view text);
std::size_t whitespace_token_count(std::string_view text);

// Number of sentences: a boundary is '.', '!' or '?' followed by whitespace
// or end of text; a trailing unterminated chunk counts as one sentence.
std::size_t sentence_count(std::string_view text);

}  // namespace seoe
