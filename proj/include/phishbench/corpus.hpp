#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phishbench {

enum class Label { Phishing, Benign };

std::string label_name(Label label);
Label label_from_name(const std::string& name);

struct WebsiteRecord {
    std::string id;
    std::string url;
    std::string html;
    Label label = Label::Benign;
    std::size_t original_char_count = 0;  // length of html

    // Distillation provenance, present on prepared corpora. source_char_count
    // is the pre-truncation document length the prompt reports to the model.
    std::optional<std::string> distilled_from;
    std::optional<std::size_t> source_char_count;
    std::optional<std::size_t> tokens_before;
    std::optional<std::size_t> tokens_after;
    std::optional<std::size_t> budget_tokens;
    std::optional<bool> budget_miss;
    std::optional<std::size_t> removed_elements;

    std::size_t prompt_char_count() const {
        return source_char_count ? *source_char_count : original_char_count;
    }
};

struct Corpus {
    std::string name;
    std::vector<WebsiteRecord> records;

    const WebsiteRecord* find(const std::string& id) const;
};

struct SamplingConfig {
    std::size_t n_per_class = 20;
    std::size_t n_strata = 5;
    std::uint64_t seed = 0;
};

struct ManifestProvenance {
    std::map<std::string, std::string> entries;  // e.g. seed, budget, estimator
};

// Manifest format: JSON Lines, one object per record with fields id, url,
// label ("phishing"|"benign"), html_path (relative to the manifest file) and
// optional char_count, which is verified against the loaded HTML. An optional
// first line carrying "manifest_version" holds provenance metadata.
Corpus load_manifest(const std::filesystem::path& path);
Corpus load_manifest(const std::filesystem::path& path, ManifestProvenance* provenance);

// Writes manifest + one HTML file per record under dir/html/<id>.html.
void save_manifest(const Corpus& corpus, const std::filesystem::path& manifest_path,
                   const ManifestProvenance* provenance = nullptr);

// Balanced stratified sample: n_per_class records per label, drawn from
// quantile bins of original_char_count. Deterministic for a given
// (corpus, cfg); output ordered by id.
Corpus stratified_sample(const Corpus& corpus, const SamplingConfig& cfg);

struct ClassBalance {
    std::size_t phishing = 0;
    std::size_t benign = 0;
};

ClassBalance class_balance(const Corpus& corpus);

} // namespace phishbench
