#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace phishbench {

struct Verdict {
    int phishing_score = 0;  // raw value, may be out of range
    bool is_phishing = false;
    std::string reasoning;
};

struct ValidatedVerdict {
    Verdict verdict;
    bool score_in_range = false;  // 0 <= phishing_score <= 10
    std::vector<std::string> anomalies;  // score_out_of_range, coerced_* tags
};

struct ParseFailure {
    enum class Reason { NoJsonFound, TruncatedJson, MissingRequiredKeys, TypeMismatch };
    Reason reason = Reason::NoJsonFound;
    std::string snippet;  // up to 200 chars of the offending output
};

std::string parse_failure_reason_name(ParseFailure::Reason reason);

using ExtractionResult = std::variant<ValidatedVerdict, ParseFailure>;

bool extraction_ok(const ExtractionResult& result);

// Scans a completion for balanced JSON object candidates (fenced blocks and
// reasoning preambles included), parses each, and returns the last candidate
// carrying all of phishing_score / is_phishing / reasoning with coercible
// types. Total: never throws on arbitrary input.
ExtractionResult extract_verdict(const std::string& raw_output);

// Score-to-decision threshold: five and above counts as phishing.
bool binary_from_score(int score);

enum class CoherenceClass { CoherentPhishing, CoherentBenign, Mismatch, Anomalous };

std::string coherence_class_name(CoherenceClass cls);

CoherenceClass coherence(const ValidatedVerdict& v);

struct KeywordLexicon {
    std::vector<std::string> phishing_terms;
    std::vector<std::string> legit_terms;

    // Throws ConfigError if a phrase appears in both lists.
    void validate() const;
    static KeywordLexicon defaults();
    static KeywordLexicon load(const std::filesystem::path& path);
};

struct KeywordTendency {
    std::size_t phishing_hits = 0;
    std::size_t legit_hits = 0;
};

// Case-insensitive whole-phrase counting, longest match first, no overlaps;
// negation phrases ("no phishing indicators") consume their sub-phrases.
KeywordTendency keyword_tendency(const std::string& reasoning,
                                 const KeywordLexicon& lexicon);

} // namespace phishbench
