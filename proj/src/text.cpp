#include "text.hpp"

#include <cctype>

#include "errors.hpp"

namespace seoe {

namespace {
inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }
inline char fold(unsigned char c) { return static_cast<char>(std::tolower(c)); }
}  // namespace

std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (is_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(fold(c));
    }
    return out;
}

std::string normalize_mention(std::string_view raw) {
    std::string out = normalize_text(raw);
    if (out.empty()) {
        throw EmptyMentionError("mention is empty after normalization: \"" +
                                std::string(raw) + "\"");
    }
    return out;
}

bool is_normalized(std::string_view s) { return normalize_text(s) == s; }

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

std::size_t whitespace_token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::size_t sentence_count(std::string_view text) {
    std::size_t count = 0;
    bool tail = false;  // non-space content since the last boundary
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '.' || c == '!' || c == '?') {
            bool at_end = i + 1 == text.size();
            bool before_space =
                !at_end && is_space(static_cast<unsigned char>(text[i + 1]));
            if (at_end || before_space) {
                ++count;
                tail = false;
                continue;
            }
        }
        if (!is_space(c)) tail = true;
    }
    if (tail) ++count;
    return count;
}

}  // namespace seoe
