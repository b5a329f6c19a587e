#include "phishbench/verdict.hpp"

#include "phishbench/errors.hpp"
#include "phishbench/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

namespace phishbench {

using nlohmann::json;

namespace {

constexpr std::size_t kSnippetLimit = 200;

std::string snippet_of(const std::string& raw) {
    return raw.substr(0, kSnippetLimit);
}

// Finds the end (one past '}') of a balanced JSON-ish object starting at
// `start`, honouring string literals and escapes. Returns npos when the
// object never closes.
std::size_t balanced_end(const std::string& s, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

struct CandidateOutcome {
    std::optional<ValidatedVerdict> verdict;
    bool parsed_object = false;
    bool had_all_keys = false;
};

std::optional<int> coerce_score(const json& value, std::vector<std::string>& anomalies) {
    if (value.is_number_integer()) return value.get<int>();
    if (value.is_number_float()) {
        double d = value.get<double>();
        anomalies.push_back("score_not_integer");
        return static_cast<int>(std::llround(d));
    }
    if (value.is_string()) {
        const std::string s = trim(value.get<std::string>());
        if (s.empty()) return std::nullopt;
        try {
            std::size_t consumed = 0;
            int v = std::stoi(s, &consumed);
            if (consumed == s.size()) {
                anomalies.push_back("score_coerced_from_string");
                return v;
            }
        } catch (...) {
        }
    }
    return std::nullopt;
}

std::optional<bool> coerce_bool(const json& value, std::vector<std::string>& anomalies) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_string()) {
        const std::string s = to_lower(trim(value.get<std::string>()));
        if (s == "true" || s == "false") {
            anomalies.push_back("bool_coerced_from_string");
            return s == "true";
        }
    }
    return std::nullopt;
}

CandidateOutcome evaluate_candidate(const std::string& candidate) {
    CandidateOutcome outcome;
    json obj;
    try {
        obj = json::parse(candidate);
    } catch (const json::exception&) {
        return outcome;
    }
    if (!obj.is_object()) return outcome;
    outcome.parsed_object = true;
    if (!obj.contains("phishing_score") || !obj.contains("is_phishing") ||
        !obj.contains("reasoning")) {
        return outcome;
    }
    outcome.had_all_keys = true;

    std::vector<std::string> anomalies;
    auto score = coerce_score(obj.at("phishing_score"), anomalies);
    auto flagged = coerce_bool(obj.at("is_phishing"), anomalies);
    if (!score || !flagged || !obj.at("reasoning").is_string()) return outcome;

    ValidatedVerdict v;
    v.verdict.phishing_score = *score;
    v.verdict.is_phishing = *flagged;
    v.verdict.reasoning = obj.at("reasoning").get<std::string>();
    v.score_in_range = *score >= 0 && *score <= 10;
    if (!v.score_in_range) anomalies.push_back("score_out_of_range");
    v.anomalies = std::move(anomalies);
    outcome.verdict = std::move(v);
    return outcome;
}

} // namespace

std::string parse_failure_reason_name(ParseFailure::Reason reason) {
    switch (reason) {
    case ParseFailure::Reason::NoJsonFound: return "no_json_found";
    case ParseFailure::Reason::TruncatedJson: return "truncated_json";
    case ParseFailure::Reason::MissingRequiredKeys: return "missing_required_keys";
    case ParseFailure::Reason::TypeMismatch: return "type_mismatch";
    }
    return "unknown";
}

bool extraction_ok(const ExtractionResult& result) {
    return std::holds_alternative<ValidatedVerdict>(result);
}

ExtractionResult extract_verdict(const std::string& raw_output) {
    std::optional<ValidatedVerdict> last_verdict;
    bool saw_unterminated = false;
    bool saw_object = false;
    bool saw_all_keys = false;

    for (std::size_t i = 0; i < raw_output.size(); ++i) {
        if (raw_output[i] != '{') continue;
        std::size_t end = balanced_end(raw_output, i);
        if (end == std::string::npos) {
            saw_unterminated = true;
            continue;
        }
        CandidateOutcome outcome = evaluate_candidate(raw_output.substr(i, end - i));
        saw_object = saw_object || outcome.parsed_object;
        saw_all_keys = saw_all_keys || outcome.had_all_keys;
        if (outcome.verdict) last_verdict = std::move(outcome.verdict);
    }

    if (last_verdict) return *last_verdict;

    ParseFailure failure;
    failure.snippet = snippet_of(raw_output);
    if (saw_all_keys) failure.reason = ParseFailure::Reason::TypeMismatch;
    else if (saw_unterminated) failure.reason = ParseFailure::Reason::TruncatedJson;
    else if (saw_object) failure.reason = ParseFailure::Reason::MissingRequiredKeys;
    else failure.reason = ParseFailure::Reason::NoJsonFound;
    return failure;
}

bool binary_from_score(int score) {
    return score >= 5;
}

std::string coherence_class_name(CoherenceClass cls) {
    switch (cls) {
    case CoherenceClass::CoherentPhishing: return "coherent_phishing";
    case CoherenceClass::CoherentBenign: return "coherent_benign";
    case CoherenceClass::Mismatch: return "mismatch";
    case CoherenceClass::Anomalous: return "anomalous";
    }
    return "unknown";
}

CoherenceClass coherence(const ValidatedVerdict& v) {
    if (!v.score_in_range) return CoherenceClass::Anomalous;
    const bool score_says_phishing = binary_from_score(v.verdict.phishing_score);
    if (v.verdict.is_phishing && score_says_phishing) return CoherenceClass::CoherentPhishing;
    if (!v.verdict.is_phishing && !score_says_phishing) return CoherenceClass::CoherentBenign;
    return CoherenceClass::Mismatch;
}

void KeywordLexicon::validate() const {
    std::set<std::string> phishing_set;
    for (const auto& term : phishing_terms) {
        if (trim(term).empty()) throw ConfigError("lexicon contains an empty phishing term");
        phishing_set.insert(to_lower(term));
    }
    for (const auto& term : legit_terms) {
        if (trim(term).empty()) throw ConfigError("lexicon contains an empty legitimacy term");
        if (phishing_set.count(to_lower(term))) {
            throw ConfigError("lexicon term '" + term + "' appears in both lists");
        }
    }
}

KeywordLexicon KeywordLexicon::defaults() {
    KeywordLexicon lexicon;
    lexicon.phishing_terms = {"phishing", "suspicious", "fraudulent", "deceptive"};
    lexicon.legit_terms = {"legitimate", "safe", "no phishing indicators", "trusted"};
    return lexicon;
}

KeywordLexicon KeywordLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon: " + path.string());
    json obj;
    try {
        in >> obj;
    } catch (const json::exception& e) {
        throw ConfigError("lexicon " + path.string() + " is not valid JSON: " + e.what());
    }
    KeywordLexicon lexicon;
    for (const auto& term : obj.value("phishing_terms", json::array()))
        lexicon.phishing_terms.push_back(term.get<std::string>());
    for (const auto& term : obj.value("legit_terms", json::array()))
        lexicon.legit_terms.push_back(term.get<std::string>());
    lexicon.validate();
    return lexicon;
}

KeywordTendency keyword_tendency(const std::string& reasoning,
                                 const KeywordLexicon& lexicon) {
    lexicon.validate();

    struct Entry {
        std::string phrase;  // lowercase
        bool phishing;
    };
    std::vector<Entry> entries;
    for (const auto& term : lexicon.phishing_terms) entries.push_back({to_lower(term), true});
    for (const auto& term : lexicon.legit_terms) entries.push_back({to_lower(term), false});
    // Longest phrase first so negations beat their sub-phrases.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.phrase.size() != b.phrase.size()) return a.phrase.size() > b.phrase.size();
        return a.phrase < b.phrase;
    });

    const std::string text = to_lower(reasoning);
    const auto is_word = [&](std::size_t i) {
        return i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) != 0);
    };

    KeywordTendency tendency;
    std::size_t i = 0;
    while (i < text.size()) {
        bool matched = false;
        for (const Entry& entry : entries) {
            if (text.compare(i, entry.phrase.size(), entry.phrase) != 0) continue;
            const bool start_ok = i == 0 || !is_word(i - 1);
            const bool end_ok = !is_word(i + entry.phrase.size());
            if (!start_ok || !end_ok) continue;
            if (entry.phishing) ++tendency.phishing_hits;
            else ++tendency.legit_hits;
            i += entry.phrase.size();
            matched = true;
            break;
        }
        if (!matched) ++i;
    }
    return tendency;
}

} // namespace phishbench
