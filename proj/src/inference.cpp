#include "phishbench/inference.hpp"

#include "phishbench/errors.hpp"
#include "phishbench/text.hpp"

#include "httplib.h"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

namespace phishbench {

using nlohmann::json;

namespace {

double unix_now() {
    return std::chrono::duration<double>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

class MonotonicTimer {
public:
    MonotonicTimer() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

json params_to_json(const SamplingParams& p) {
    return json{{"temperature", p.temperature},
                {"top_p", p.top_p},
                {"top_k", p.top_k},
                {"context_window", p.context_window},
                {"max_output_tokens", p.max_output_tokens}};
}

SamplingParams params_from_json(const json& obj) {
    SamplingParams p;
    p.temperature = obj.value("temperature", 0.0);
    p.top_p = obj.value("top_p", 0.0);
    p.top_k = obj.value("top_k", 1);
    p.context_window = obj.value("context_window", 131072);
    p.max_output_tokens = obj.value("max_output_tokens", 1000);
    return p;
}

json plan_to_json(const RunPlan& plan) {
    return json{{"models", plan.models},
                {"repeats_per_website", plan.repeats_per_website},
                {"discard_first_run", plan.discard_first_run},
                {"dataset_tag", plan.dataset_tag}};
}

RunPlan plan_from_json(const json& obj) {
    RunPlan plan;
    plan.models = obj.value("models", std::vector<std::string>{});
    plan.repeats_per_website = obj.value("repeats_per_website", 1);
    plan.discard_first_run = obj.value("discard_first_run", false);
    plan.dataset_tag = obj.value("dataset_tag", std::string{});
    return plan;
}

json record_to_json(const RunRecord& r) {
    json obj{{"model", r.model},
             {"website_id", r.website_id},
             {"dataset_tag", r.dataset_tag},
             {"run_index", r.run_index},
             {"latency_s", r.latency_s},
             {"raw_output", r.raw_output},
             {"prompt_tokens", r.prompt_tokens},
             {"discarded", r.discarded}};
    if (r.failed) {
        obj["failed"] = true;
        obj["failure_reason"] = r.failure_reason;
    }
    if (r.prompt_capped) obj["prompt_capped"] = true;
    return obj;
}

RunRecord record_from_json(const json& obj) {
    RunRecord r;
    r.model = obj.at("model").get<std::string>();
    r.website_id = obj.at("website_id").get<std::string>();
    r.dataset_tag = obj.value("dataset_tag", std::string{});
    r.run_index = obj.at("run_index").get<int>();
    r.latency_s = obj.value("latency_s", 0.0);
    r.raw_output = obj.value("raw_output", std::string{});
    r.prompt_tokens = obj.value("prompt_tokens", std::size_t{0});
    r.discarded = obj.value("discarded", false);
    r.failed = obj.value("failed", false);
    r.failure_reason = obj.value("failure_reason", std::string{});
    r.prompt_capped = obj.value("prompt_capped", false);
    return r;
}

std::string triple_key(const std::string& model, const std::string& website_id, int run) {
    return model + "\x1f" + website_id + "\x1f" + std::to_string(run);
}

} // namespace

RunPlan RunPlan::exp1_preset() {
    RunPlan plan;
    plan.repeats_per_website = 5;
    plan.discard_first_run = false;
    return plan;
}

RunPlan RunPlan::exp2_preset() {
    RunPlan plan;
    plan.repeats_per_website = 2;
    plan.discard_first_run = true;
    return plan;
}

GenerateResult generate(Transport& transport, const std::string& model,
                        const RenderedPrompt& prompt, const SamplingParams& params,
                        int run_index) {
    if (model.empty()) throw ConfigError("model name must be non-empty");
    GenerateRequest request{model, prompt.text, params, run_index};
    std::optional<RunFailure> failure;
    GenerateResult result = transport.generate(request, failure);
    if (failure) throw TransportError("run failed: " + failure->reason);
    return result;
}

// ---------------------------------------------------------------------------
// HTTP transport
// ---------------------------------------------------------------------------

struct HttpTransport::Impl {
    std::string base_url;
    int max_attempts;
    double backoff_start_s;
    httplib::Client client;

    Impl(std::string url, int attempts, double backoff)
        : base_url(std::move(url)), max_attempts(attempts), backoff_start_s(backoff),
          client(base_url) {
        client.set_read_timeout(600, 0);
        client.set_connection_timeout(10, 0);
    }
};

HttpTransport::HttpTransport(std::string base_url, int max_attempts, double backoff_start_s)
    : impl_(std::make_unique<Impl>(std::move(base_url), max_attempts, backoff_start_s)) {}

HttpTransport::~HttpTransport() = default;

GenerateResult HttpTransport::generate(const GenerateRequest& request,
                                       std::optional<RunFailure>& failure) {
    json body{{"model", request.model},
              {"prompt", request.prompt},
              {"stream", false},
              {"options",
               {{"temperature", request.params.temperature},
                {"top_p", request.params.top_p},
                {"top_k", request.params.top_k},
                {"num_ctx", request.params.context_window},
                {"num_predict", request.params.max_output_tokens}}}};
    const std::string payload = body.dump();

    std::string last_error;
    double backoff = impl_->backoff_start_s;
    for (int attempt = 1; attempt <= impl_->max_attempts; ++attempt) {
        MonotonicTimer timer;
        auto res = impl_->client.Post("/api/generate", payload, "application/json");
        const double latency = timer.elapsed_s();
        if (!res) {
            last_error = "connection failure (" + httplib::to_string(res.error()) + ")";
        } else if (res->status == 200) {
            json reply;
            try {
                reply = json::parse(res->body);
            } catch (const json::exception& e) {
                last_error = std::string("unparseable endpoint response: ") + e.what();
                res = nullptr;
            }
            if (res) {
                if (reply.contains("error")) {
                    const std::string err = reply.at("error").get<std::string>();
                    failure = RunFailure{err, latency};
                    return {};
                }
                return {reply.value("response", std::string{}), latency};
            }
        } else {
            std::string err = res->body;
            try {
                json reply = json::parse(res->body);
                err = reply.value("error", err);
            } catch (const json::exception&) {
            }
            const std::string lowered = to_lower(err);
            if (lowered.find("not found") != std::string::npos) {
                throw ConfigError("endpoint rejected model '" + request.model + "': " + err);
            }
            if (lowered.find("context") != std::string::npos ||
                lowered.find("too long") != std::string::npos) {
                failure = RunFailure{err, latency};
                return {};
            }
            last_error = "HTTP " + std::to_string(res->status) + ": " + err;
        }
        if (attempt < impl_->max_attempts) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2;
        }
    }
    throw TransportError("generate request to " + impl_->base_url + " failed after " +
                         std::to_string(impl_->max_attempts) + " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Record / replay
// ---------------------------------------------------------------------------

std::string request_key(const std::string& model, const std::string& prompt, int run_index) {
    return model + "#" + fnv1a64_hex(prompt) + "#" + std::to_string(run_index);
}

RecordingTransport::RecordingTransport(Transport& inner,
                                       const std::filesystem::path& fixture_path)
    : inner_(inner), path_(fixture_path) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw ConfigError("cannot create fixture file: " + path_.string());
}

GenerateResult RecordingTransport::generate(const GenerateRequest& request,
                                            std::optional<RunFailure>& failure) {
    GenerateResult result = inner_.generate(request, failure);
    json entry{{"key", request_key(request.model, request.prompt, request.run_index)},
               {"model", request.model},
               {"run_index", request.run_index}};
    if (failure) {
        entry["failed"] = true;
        entry["failure_reason"] = failure->reason;
        entry["latency_s"] = failure->latency_s;
    } else {
        entry["completion"] = result.completion;
        entry["latency_s"] = result.latency_s;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    out << entry.dump() << "\n";
    return result;
}

ReplayTransport::ReplayTransport(const std::filesystem::path& fixture_path,
                                 double sleep_scale)
    : sleep_scale_(sleep_scale) {
    std::ifstream in(fixture_path);
    if (!in) throw ConfigError("cannot open replay fixture: " + fixture_path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError(fixture_path.string() + ":" + std::to_string(line_no) +
                              ": malformed fixture line: " + e.what());
        }
        Entry parsed;
        parsed.completion = entry.value("completion", std::string{});
        parsed.latency_s = entry.value("latency_s", 0.0);
        parsed.failed = entry.value("failed", false);
        parsed.failure_reason = entry.value("failure_reason", std::string{});
        entries_[entry.at("key").get<std::string>()] = std::move(parsed);
    }
}

GenerateResult ReplayTransport::generate(const GenerateRequest& request,
                                         std::optional<RunFailure>& failure) {
    const std::string key = request_key(request.model, request.prompt, request.run_index);
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ReplayMissError(key);
    const Entry& entry = it->second;
    if (sleep_scale_ > 0 && entry.latency_s > 0) {
        std::this_thread::sleep_for(
            std::chrono::duration<double>(entry.latency_s * sleep_scale_));
    }
    if (entry.failed) {
        failure = RunFailure{entry.failure_reason, entry.latency_s};
        return {};
    }
    return {entry.completion, entry.latency_s};
}

// ---------------------------------------------------------------------------
// Experiment orchestration
// ---------------------------------------------------------------------------

std::vector<PreparedWebsite> prepare_websites(const Corpus& corpus,
                                              const PromptTemplate& tmpl,
                                              TokenEstimator estimator) {
    std::vector<PreparedWebsite> out;
    out.reserve(corpus.records.size());
    for (const auto& record : corpus.records) {
        DistilledHtml view;
        view.html = record.html;
        out.push_back({&record, render(tmpl, record, view, estimator)});
    }
    return out;
}

namespace {

class LogWriter {
public:
    LogWriter(const std::filesystem::path& path, bool append) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, append ? std::ios::app : std::ios::trunc);
        if (!out_) throw ConfigError("cannot open run log for writing: " + path.string());
    }

    void write_line(const json& obj) {
        std::lock_guard<std::mutex> lock(mutex_);
        out_ << obj.dump() << "\n";
        out_.flush();
    }

private:
    std::ofstream out_;
    std::mutex mutex_;
};

} // namespace

RunLog run_experiment(const std::vector<PreparedWebsite>& websites, const RunPlan& plan,
                      const SamplingParams& params, Transport& transport,
                      const std::filesystem::path& log_path,
                      const ExperimentOptions& options) {
    if (websites.empty()) throw ConfigError("experiment requires a non-empty corpus");
    if (plan.models.empty()) throw ConfigError("experiment requires at least one model");
    if (plan.repeats_per_website < 1) throw ConfigError("repeats_per_website must be >= 1");

    RunLog log;
    log.plan = plan;
    log.params = params;
    log.sequential = options.parallel_workers <= 1;

    std::set<std::string> completed;
    const bool resuming = options.resume && std::filesystem::exists(log_path) &&
                          std::filesystem::file_size(log_path) > 0;
    if (resuming) {
        RunLog existing = load_runlog(log_path);
        if (existing.plan.models != plan.models ||
            existing.plan.repeats_per_website != plan.repeats_per_website ||
            existing.plan.discard_first_run != plan.discard_first_run ||
            existing.plan.dataset_tag != plan.dataset_tag) {
            throw ConfigError("cannot resume: existing log " + log_path.string() +
                              " was produced under a different plan");
        }
        log.started_at = existing.started_at;
        log.records = std::move(existing.records);
        for (const auto& r : log.records) {
            completed.insert(triple_key(r.model, r.website_id, r.run_index));
        }
    } else {
        log.started_at = unix_now();
    }

    LogWriter writer(log_path, resuming);
    if (!resuming) {
        writer.write_line(json{{"schema", "phishbench.runlog/1"},
                               {"plan", plan_to_json(plan)},
                               {"params", params_to_json(params)},
                               {"started_at", log.started_at},
                               {"sequential", log.sequential}});
    }

    std::mutex record_mutex;
    const auto run_one = [&](const std::string& model, const PreparedWebsite& site,
                             int run_index) {
        RunRecord record;
        record.model = model;
        record.website_id = site.record->id;
        record.dataset_tag = plan.dataset_tag;
        record.run_index = run_index;
        record.discarded = run_index == 0 && plan.discard_first_run;
        record.prompt_tokens = site.prompt.token_estimate;

        std::string prompt_text = site.prompt.text;
        if (site.prompt.token_estimate >
            static_cast<std::size_t>(params.context_window)) {
            prompt_text = truncate_to_tokens(
                prompt_text, static_cast<std::size_t>(params.context_window),
                options.estimator);
            record.prompt_capped = true;
            record.prompt_tokens = count_tokens(prompt_text, options.estimator);
        }

        GenerateRequest request{model, prompt_text, params, run_index};
        std::optional<RunFailure> failure;
        GenerateResult result = transport.generate(request, failure);
        if (failure) {
            record.failed = true;
            record.failure_reason = failure->reason;
            record.latency_s = failure->latency_s;
        } else {
            record.raw_output = result.completion;
            record.latency_s = result.latency_s;
        }
        writer.write_line(record_to_json(record));
        std::lock_guard<std::mutex> lock(record_mutex);
        log.records.push_back(std::move(record));
    };

    // A thrown error leaves the partial log on disk without a footer, which
    // marks it as aborted and resumable.
    for (const std::string& model : plan.models) {
        if (options.parallel_workers <= 1) {
            for (const PreparedWebsite& site : websites) {
                for (int run = 0; run < plan.repeats_per_website; ++run) {
                    if (completed.count(triple_key(model, site.record->id, run))) continue;
                    run_one(model, site, run);
                }
            }
        } else {
            // Each worker owns whole websites, so per-(model, website) run
            // indices stay ordered in the log.
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> workers;
            std::exception_ptr error;
            std::mutex error_mutex;
            const int n_workers = std::min<int>(options.parallel_workers,
                                                static_cast<int>(websites.size()));
            for (int w = 0; w < n_workers; ++w) {
                workers.emplace_back([&]() {
                    try {
                        for (std::size_t i = next.fetch_add(1); i < websites.size();
                             i = next.fetch_add(1)) {
                            for (int run = 0; run < plan.repeats_per_website; ++run) {
                                if (completed.count(
                                        triple_key(model, websites[i].record->id, run)))
                                    continue;
                                run_one(model, websites[i], run);
                            }
                        }
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                });
            }
            for (auto& worker : workers) worker.join();
            if (error) std::rethrow_exception(error);
        }
    }

    log.finished_at = unix_now();
    writer.write_line(json{{"finished_at", log.finished_at}});
    return log;
}

RunLog load_runlog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run log: " + path.string());
    RunLog log;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": malformed run-log line: " + e.what());
        }
        if (obj.contains("schema")) {
            log.plan = plan_from_json(obj.at("plan"));
            log.params = params_from_json(obj.at("params"));
            log.started_at = obj.value("started_at", 0.0);
            log.sequential = obj.value("sequential", true);
            have_header = true;
        } else if (obj.contains("finished_at")) {
            log.finished_at = obj.at("finished_at").get<double>();
        } else {
            log.records.push_back(record_from_json(obj));
        }
    }
    if (!have_header) {
        throw ConfigError("run log " + path.string() + " has no header line");
    }
    log.aborted = log.finished_at == 0.0;
    return log;
}

void save_runlog(const RunLog& log, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write run log: " + path.string());
    out << json{{"schema", "phishbench.runlog/1"},
                {"plan", plan_to_json(log.plan)},
                {"params", params_to_json(log.params)},
                {"started_at", log.started_at},
                {"sequential", log.sequential}}
               .dump()
        << "\n";
    for (const auto& record : log.records) out << record_to_json(record).dump() << "\n";
    if (log.finished_at != 0.0) out << json{{"finished_at", log.finished_at}}.dump() << "\n";
}

} // namespace phishbench
