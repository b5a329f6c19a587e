#pragma once

#include <cstddef>
#include <string>

namespace phishbench {

// Model-agnostic token estimators. The harness never binds to a specific
// model vocabulary; both estimators are deterministic and monotone under
// concatenation.
enum class TokenEstimator {
    CharsPerFour,   // ceil(length / 4), the common rule of thumb
    WordPunct,      // alphanumeric runs plus individual punctuation marks
};

std::size_t count_tokens(const std::string& text, TokenEstimator estimator);

// Longest prefix of `text` whose estimate does not exceed `max_tokens`.
std::string truncate_to_tokens(const std::string& text, std::size_t max_tokens,
                               TokenEstimator estimator);

TokenEstimator token_estimator_from_name(const std::string& name);
std::string token_estimator_name(TokenEstimator estimator);

} // namespace phishbench
