#pragma once

#include "phishbench/corpus.hpp"
#include "phishbench/prompt.hpp"
#include "phishbench/tokens.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace phishbench {

struct SamplingParams {
    double temperature = 0.0;
    double top_p = 0.0;
    int top_k = 1;
    int context_window = 131072;       // num_ctx; 65536 fallback for VRAM-bound hosts
    int max_output_tokens = 1000;      // num_predict
};

struct RunPlan {
    std::vector<std::string> models;
    int repeats_per_website = 5;
    bool discard_first_run = false;
    std::string dataset_tag;

    static RunPlan exp1_preset();  // 5 repeats, keep all runs
    static RunPlan exp2_preset();  // 2 runs, first discarded as warm-up
};

struct RunRecord {
    std::string model;
    std::string website_id;
    std::string dataset_tag;
    int run_index = 0;
    double latency_s = 0.0;
    std::string raw_output;
    std::size_t prompt_tokens = 0;
    bool discarded = false;
    bool failed = false;
    std::string failure_reason;
    bool prompt_capped = false;
};

struct RunLog {
    std::vector<RunRecord> records;
    RunPlan plan;
    SamplingParams params;
    double started_at = 0.0;   // unix epoch seconds
    double finished_at = 0.0;  // 0 when the log has no footer (aborted run)
    bool sequential = true;
    bool aborted = false;
};

struct GenerateRequest {
    std::string model;
    std::string prompt;
    SamplingParams params;
    int run_index = 0;
};

struct GenerateResult {
    std::string completion;
    double latency_s = 0.0;  // wall clock, request dispatch to full response
};

// Result of a single endpoint call that completed at the protocol level but
// failed for this run (e.g. context overflow) — recorded, not thrown.
struct RunFailure {
    std::string reason;
    double latency_s = 0.0;
};

class Transport {
public:
    virtual ~Transport() = default;
    // Throws TransportError after retries are exhausted and ConfigError for
    // fatal misconfiguration (unknown model). Per-run content failures are
    // returned through `failure`.
    virtual GenerateResult generate(const GenerateRequest& request,
                                    std::optional<RunFailure>& failure) = 0;
};

GenerateResult generate(Transport& transport, const std::string& model,
                        const RenderedPrompt& prompt, const SamplingParams& params,
                        int run_index = 0);

// Client for the de-facto local-LLM generate API: POST <base>/api/generate
// with {model, prompt, stream:false, options:{...}}; the completion comes
// back in the "response" field. Transport-level failures are retried three
// times with exponential backoff starting at one second.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::string base_url, int max_attempts = 3,
                           double backoff_start_s = 1.0);
    ~HttpTransport() override;
    GenerateResult generate(const GenerateRequest& request,
                            std::optional<RunFailure>& failure) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Replay key: model, FNV-1a of the prompt text, run index.
std::string request_key(const std::string& model, const std::string& prompt, int run_index);

// Wraps a live transport and appends every (key -> completion, latency) pair
// to a fixture file.
class RecordingTransport : public Transport {
public:
    RecordingTransport(Transport& inner, const std::filesystem::path& fixture_path);
    GenerateResult generate(const GenerateRequest& request,
                            std::optional<RunFailure>& failure) override;

private:
    Transport& inner_;
    std::filesystem::path path_;
    std::mutex mutex_;
};

// Serves recorded completions with their scripted latencies and no network.
// Unknown keys raise ReplayMissError. sleep_scale controls how much of the
// scripted latency is actually slept (0 disables sleeping); the reported
// latency is always the scripted value so downstream output is reproducible.
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(const std::filesystem::path& fixture_path,
                             double sleep_scale = 1.0);
    GenerateResult generate(const GenerateRequest& request,
                            std::optional<RunFailure>& failure) override;

private:
    struct Entry {
        std::string completion;
        double latency_s = 0.0;
        bool failed = false;
        std::string failure_reason;
    };
    std::map<std::string, Entry> entries_;
    double sleep_scale_;
};

struct PreparedWebsite {
    const WebsiteRecord* record = nullptr;
    RenderedPrompt prompt;
};

std::vector<PreparedWebsite> prepare_websites(const Corpus& corpus,
                                              const PromptTemplate& tmpl,
                                              TokenEstimator estimator);

struct ExperimentOptions {
    TokenEstimator estimator = TokenEstimator::CharsPerFour;
    bool resume = false;
    int parallel_workers = 1;  // >1 flags runtime stats as non-comparable
};

// Runs models (outer) x websites (inner) x repeats (innermost), appending one
// JSONL record per run so a crash loses at most the in-flight record. With
// resume, completed (model, website, run) triples are skipped.
RunLog run_experiment(const std::vector<PreparedWebsite>& websites, const RunPlan& plan,
                      const SamplingParams& params, Transport& transport,
                      const std::filesystem::path& log_path,
                      const ExperimentOptions& options = {});

RunLog load_runlog(const std::filesystem::path& path);
void save_runlog(const RunLog& log, const std::filesystem::path& path);

} // namespace phishbench
