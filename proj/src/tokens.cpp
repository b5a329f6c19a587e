#include "phishbench/tokens.hpp"

#include "phishbench/errors.hpp"

#include <cctype>

namespace phishbench {

namespace {

std::size_t count_word_punct(const std::string& text) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (std::isalnum(c) || c >= 0x80) {
            // One token per alphanumeric/multibyte run.
            ++count;
            while (i < text.size()) {
                unsigned char d = static_cast<unsigned char>(text[i]);
                if (std::isalnum(d) || d >= 0x80) ++i;
                else break;
            }
        } else {
            // Each punctuation mark is its own token.
            ++count;
            ++i;
        }
    }
    return count;
}

} // namespace

std::size_t count_tokens(const std::string& text, TokenEstimator estimator) {
    switch (estimator) {
    case TokenEstimator::CharsPerFour:
        return (text.size() + 3) / 4;
    case TokenEstimator::WordPunct:
        return count_word_punct(text);
    }
    return 0;
}

std::string truncate_to_tokens(const std::string& text, std::size_t max_tokens,
                               TokenEstimator estimator) {
    if (count_tokens(text, estimator) <= max_tokens) return text;
    if (estimator == TokenEstimator::CharsPerFour) {
        return text.substr(0, max_tokens * 4);
    }
    // WordPunct: binary search the longest prefix under the cap. The count is
    // monotone in prefix length, so this is well defined.
    std::size_t lo = 0, hi = text.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (count_tokens(text.substr(0, mid), estimator) <= max_tokens) lo = mid;
        else hi = mid - 1;
    }
    return text.substr(0, lo);
}

TokenEstimator token_estimator_from_name(const std::string& name) {
    if (name == "chars4") return TokenEstimator::CharsPerFour;
    if (name == "wordpunct") return TokenEstimator::WordPunct;
    throw ConfigError("unknown token estimator '" + name + "' (expected chars4 or wordpunct)");
}

std::string token_estimator_name(TokenEstimator estimator) {
    return estimator == TokenEstimator::CharsPerFour ? "chars4" : "wordpunct";
}

} // namespace phishbench
