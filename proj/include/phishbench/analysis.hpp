#pragma once

#include "phishbench/corpus.hpp"
#include "phishbench/inference.hpp"
#include "phishbench/verdict.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phishbench {

// ---------------------------------------------------------------------------
// Classification metrics
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t nan_count = 0;  // runs with no usable decision

    std::size_t total() const { return tp + tn + fp + fn + nan_count; }
    std::size_t decided() const { return tp + tn + fp + fn; }
};

struct Metrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    double nan_proportion = 0.0;

    bool undefined() const { return !accuracy && !precision && !recall && !f1; }
};

enum class DecisionSource { Boolean, Score };

std::string decision_source_name(DecisionSource source);

// Per-run boolean classification outcome, the unit of Tables 3 and 4.
enum class RunOutcome { True, False, NaN };

RunOutcome boolean_outcome(const RunRecord& record);

// One decision per (model, website): the last retained run (the second run in
// the two-run protocol). Parse failures and, for the score source,
// out-of-range scores land in nan_count. Throws ConfigError when the log
// references websites missing from the corpus.
ConfusionMatrix confusion(const RunLog& log, const Corpus& corpus,
                          DecisionSource source, const std::string& model);

std::map<std::string, ConfusionMatrix> confusion_by_model(const RunLog& log,
                                                          const Corpus& corpus,
                                                          DecisionSource source);

Metrics metrics(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Validity, stability, coherence
// ---------------------------------------------------------------------------

struct ValidityHistogram {
    int repeats = 0;  // R
    // (model, dataset) -> counts[k] = websites with exactly k valid-JSON runs
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> counts;

    // Per-model counts pooled over datasets (the Table 2 view).
    std::map<std::string, std::vector<std::size_t>> pooled() const;
};

ValidityHistogram validity_histogram(const std::vector<const RunLog*>& logs);

// Per (model, website): number of run indices whose boolean outcome differs
// between the two logs. Both logs must cover the same models, websites and
// repeat count.
std::map<std::pair<std::string, std::string>, int> stability_diff(const RunLog& log_a,
                                                                  const RunLog& log_b);

// Aggregated per model: counts[d] = websites with exactly d differing runs.
std::map<std::string, std::vector<std::size_t>> stability_histogram(const RunLog& log_a,
                                                                    const RunLog& log_b);

struct CoherenceCell {
    std::array<std::size_t, 11> score_counts{};  // in-range scores 0..10
    std::size_t anomalous = 0;                   // out-of-range scores
    std::size_t nan = 0;                         // no parseable verdict
    std::size_t below_threshold = 0;             // score < 5 (including out-of-range)
    std::size_t at_or_above_threshold = 0;       // score >= 5

    bool empty() const;
};

// (dataset, model, category) -> cell, category in {"True", "False", "NaN"}.
using CoherenceTable = std::map<std::tuple<std::string, std::string, std::string>, CoherenceCell>;

CoherenceTable coherence_table(const std::vector<const RunLog*>& logs);

// ---------------------------------------------------------------------------
// Runtime statistics
// ---------------------------------------------------------------------------

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

FiveNumberSummary five_number_summary(std::vector<double> values);

// Population Pearson correlation, two-pass. Undefined for fewer than three
// points or zero variance on either axis.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

struct ModelRuntimeStats {
    std::map<std::string, double> mean_latency_by_dataset;  // retained runs
    std::optional<double> pearson_r;                        // latency vs prompt tokens
    std::size_t correlation_points = 0;
    std::optional<FiveNumberSummary> log10_ratio;           // log10(lat_a / lat_b)
    std::size_t ratio_points = 0;
};

struct RuntimeStats {
    std::map<std::string, ModelRuntimeStats> by_model;
    bool comparable = true;  // false when any log ran with parallel workers
};

RuntimeStats runtime_summary(const std::vector<const RunLog*>& logs);

// Fills log10_ratio per model from runs paired by (model, website, run_index);
// numerator comes from log_a. Pairs where either side failed are skipped.
void add_runtime_ratios(RuntimeStats& stats, const RunLog& log_a, const RunLog& log_b);

// ---------------------------------------------------------------------------
// Model gating
// ---------------------------------------------------------------------------

struct GatingPolicy {
    int min_valid_runs = 4;
    double max_failing_fraction = 0.5;
    std::vector<std::string> override_exclude;
};

struct GatingDecision {
    std::string model;
    bool excluded = false;
    // "stated_rule": failing fraction exceeded the policy threshold.
    // "override": excluded only via the explicit override list.
    // "pass": included.
    std::string rule;
    std::size_t failing_websites = 0;
    std::size_t total_websites = 0;
    double failing_fraction = 0.0;
    // True for override exclusions the stated rule alone would have admitted.
    bool stated_rule_would_include = false;
};

std::vector<GatingDecision> gate_models(const ValidityHistogram& hist,
                                        const GatingPolicy& policy);

// ---------------------------------------------------------------------------
// Cost model
// ---------------------------------------------------------------------------

struct RateCard {
    std::string name;
    std::string currency = "USD";
    double input_rate = 0.0;   // per million input tokens
    double output_rate = 0.0;  // per million output tokens
    std::optional<double> gpu_hour_rate;
    std::optional<double> gpu_capex;
};

double api_cost(std::uint64_t input_tokens, std::uint64_t output_tokens,
                const RateCard& card);

struct TokenMix {
    double input_share = 0.0;
    double output_share = 0.0;
};

struct BreakEven {
    std::string card_name;
    std::string currency;
    double gpu_capex = 0.0;
    TokenMix mix;
    std::optional<double> blended_rate_per_mtok;  // nullopt when mix sums to zero
    std::optional<double> break_even_tokens;      // nullopt when the rate is zero
    std::optional<double> tokens_per_analysis;
    std::optional<double> analyses;
};

BreakEven break_even(const RateCard& card, const TokenMix& mix,
                     std::optional<double> tokens_per_analysis = std::nullopt);

// ---------------------------------------------------------------------------
// Keyword tendencies
// ---------------------------------------------------------------------------

// (model, dataset) -> summed tendencies over retained runs' reasoning texts.
std::map<std::pair<std::string, std::string>, KeywordTendency> keyword_report(
    const std::vector<const RunLog*>& logs, const KeywordLexicon& lexicon);

} // namespace phishbench
