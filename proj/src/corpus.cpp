#include "phishbench/corpus.hpp"

#include "phishbench/errors.hpp"
#include "phishbench/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace phishbench {

using nlohmann::json;

std::string label_name(Label label) {
    return label == Label::Phishing ? "phishing" : "benign";
}

Label label_from_name(const std::string& name) {
    if (name == "phishing") return Label::Phishing;
    if (name == "benign") return Label::Benign;
    throw LoadError("unknown label '" + name + "' (expected phishing or benign)");
}

const WebsiteRecord* Corpus::find(const std::string& id) const {
    for (const auto& record : records) {
        if (record.id == id) return &record;
    }
    return nullptr;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename T>
std::optional<T> opt_field(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return obj.at(key).get<T>();
}

WebsiteRecord record_from_json(const json& obj, const std::filesystem::path& base_dir,
                               const std::filesystem::path& manifest, std::size_t line_no) {
    const auto context = [&](const std::string& what) {
        return manifest.string() + ":" + std::to_string(line_no) + ": " + what;
    };
    for (const char* key : {"id", "url", "label", "html_path"}) {
        if (!obj.contains(key)) throw LoadError(context("missing required field '" + std::string(key) + "'"));
    }
    WebsiteRecord record;
    record.id = obj.at("id").get<std::string>();
    record.url = obj.at("url").get<std::string>();
    if (record.url.empty()) throw LoadError(context("url must be non-empty"));
    record.label = label_from_name(obj.at("label").get<std::string>());

    std::filesystem::path html_path = base_dir / obj.at("html_path").get<std::string>();
    if (!std::filesystem::exists(html_path)) {
        throw LoadError(context("referenced HTML file does not exist: " + html_path.string()));
    }
    record.html = sanitize_utf8(read_file(html_path));
    record.original_char_count = record.html.size();

    if (auto declared = opt_field<std::size_t>(obj, "char_count")) {
        if (*declared != record.original_char_count) {
            throw LoadError(context("declared char_count " + std::to_string(*declared) +
                                    " does not match actual HTML length " +
                                    std::to_string(record.original_char_count) +
                                    " for id '" + record.id + "'"));
        }
    }
    record.distilled_from = opt_field<std::string>(obj, "distilled_from");
    record.source_char_count = opt_field<std::size_t>(obj, "source_char_count");
    record.tokens_before = opt_field<std::size_t>(obj, "tokens_before");
    record.tokens_after = opt_field<std::size_t>(obj, "tokens_after");
    record.budget_tokens = opt_field<std::size_t>(obj, "budget_tokens");
    record.budget_miss = opt_field<bool>(obj, "budget_miss");
    record.removed_elements = opt_field<std::size_t>(obj, "removed_elements");
    return record;
}

} // namespace

Corpus load_manifest(const std::filesystem::path& path) {
    return load_manifest(path, nullptr);
}

Corpus load_manifest(const std::filesystem::path& path, ManifestProvenance* provenance) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open manifest: " + path.string());
    const std::filesystem::path base_dir = path.parent_path();

    Corpus corpus;
    corpus.name = path.stem().string();
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed manifest line: " + e.what());
        }
        if (!obj.is_object()) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": manifest line is not a JSON object");
        }
        if (obj.contains("manifest_version")) {
            if (line_no != 1) {
                throw LoadError(path.string() + ":" + std::to_string(line_no) +
                                ": manifest header allowed on line 1 only");
            }
            if (provenance && obj.contains("provenance")) {
                for (const auto& [key, value] : obj.at("provenance").items()) {
                    provenance->entries[key] =
                        value.is_string() ? value.get<std::string>() : value.dump();
                }
            }
            continue;
        }
        WebsiteRecord record = record_from_json(obj, base_dir, path, line_no);
        if (!seen_ids.insert(record.id).second) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": duplicate id '" + record.id + "'");
        }
        corpus.records.push_back(std::move(record));
    }
    return corpus;
}

void save_manifest(const Corpus& corpus, const std::filesystem::path& manifest_path,
                   const ManifestProvenance* provenance) {
    const std::filesystem::path dir = manifest_path.parent_path();
    const std::filesystem::path html_dir = dir / "html";
    std::filesystem::create_directories(html_dir);

    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write manifest: " + manifest_path.string());

    if (provenance) {
        json header;
        header["manifest_version"] = 1;
        json prov = json::object();
        for (const auto& [key, value] : provenance->entries) prov[key] = value;
        header["provenance"] = prov;
        out << header.dump() << "\n";
    }

    for (const auto& record : corpus.records) {
        const std::string rel_html = "html/" + record.id + ".html";
        {
            std::ofstream html_out(dir / rel_html, std::ios::binary | std::ios::trunc);
            html_out << record.html;
        }
        json obj;
        obj["id"] = record.id;
        obj["url"] = record.url;
        obj["label"] = label_name(record.label);
        obj["html_path"] = rel_html;
        obj["char_count"] = record.html.size();
        if (record.distilled_from) obj["distilled_from"] = *record.distilled_from;
        if (record.source_char_count) obj["source_char_count"] = *record.source_char_count;
        if (record.tokens_before) obj["tokens_before"] = *record.tokens_before;
        if (record.tokens_after) obj["tokens_after"] = *record.tokens_after;
        if (record.budget_tokens) obj["budget_tokens"] = *record.budget_tokens;
        if (record.budget_miss) obj["budget_miss"] = *record.budget_miss;
        if (record.removed_elements) obj["removed_elements"] = *record.removed_elements;
        out << obj.dump() << "\n";
    }
}

namespace {

// Indices of one class, sorted by (char count, id), cut into quantile bins by
// index range: bin k covers [floor(k*m/n), floor((k+1)*m/n)).
std::vector<std::vector<std::size_t>> quantile_bins(
    const std::vector<std::size_t>& sorted_indices, std::size_t n_strata) {
    const std::size_t m = sorted_indices.size();
    std::vector<std::vector<std::size_t>> bins(n_strata);
    for (std::size_t k = 0; k < n_strata; ++k) {
        std::size_t begin = k * m / n_strata;
        std::size_t end = (k + 1) * m / n_strata;
        bins[k].assign(sorted_indices.begin() + static_cast<std::ptrdiff_t>(begin),
                       sorted_indices.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return bins;
}

// Per-bin quotas: floor(n_per_class/n_strata) each, remainder assigned to the
// longest-length strata first; deficits from small bins are redistributed to
// bins that still have capacity, preferring longer strata.
std::vector<std::size_t> bin_quotas(const std::vector<std::vector<std::size_t>>& bins,
                                    std::size_t n_per_class) {
    const std::size_t n = bins.size();
    std::vector<std::size_t> quota(n, n_per_class / n);
    std::size_t remainder = n_per_class % n;
    for (std::size_t k = n; k-- > 0 && remainder > 0;) {
        ++quota[k];
        --remainder;
    }
    // Cap at bin size and push the shortfall elsewhere.
    std::size_t deficit = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (quota[k] > bins[k].size()) {
            deficit += quota[k] - bins[k].size();
            quota[k] = bins[k].size();
        }
    }
    while (deficit > 0) {
        bool progressed = false;
        for (std::size_t k = n; k-- > 0 && deficit > 0;) {
            if (quota[k] < bins[k].size()) {
                ++quota[k];
                --deficit;
                progressed = true;
            }
        }
        if (!progressed) break;  // unreachable when population >= n_per_class
    }
    return quota;
}

} // namespace

Corpus stratified_sample(const Corpus& corpus, const SamplingConfig& cfg) {
    if (cfg.n_strata == 0) throw SamplingError("n_strata must be >= 1");
    if (cfg.n_per_class == 0) throw SamplingError("n_per_class must be >= 1");

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        by_class[corpus.records[i].label == Label::Benign ? 1 : 0].push_back(i);
    }
    for (int cls = 0; cls < 2; ++cls) {
        Label label = cls == 0 ? Label::Phishing : Label::Benign;
        if (by_class[cls].size() < cfg.n_per_class) {
            throw SamplingError("insufficient " + label_name(label) + " population: need " +
                                std::to_string(cfg.n_per_class) + ", have " +
                                std::to_string(by_class[cls].size()) + " (short by " +
                                std::to_string(cfg.n_per_class - by_class[cls].size()) + ")");
        }
    }

    DeterministicRng rng(cfg.seed);
    std::vector<std::size_t> selected;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t>& indices = by_class[cls];
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            const auto& ra = corpus.records[a];
            const auto& rb = corpus.records[b];
            if (ra.original_char_count != rb.original_char_count)
                return ra.original_char_count < rb.original_char_count;
            return ra.id < rb.id;
        });
        auto bins = quantile_bins(indices, cfg.n_strata);
        auto quotas = bin_quotas(bins, cfg.n_per_class);
        for (std::size_t k = 0; k < bins.size(); ++k) {
            deterministic_shuffle(bins[k], rng);
            for (std::size_t j = 0; j < quotas[k]; ++j) selected.push_back(bins[k][j]);
        }
    }

    Corpus sample;
    sample.name = corpus.name + "-sample";
    sample.records.reserve(selected.size());
    for (std::size_t idx : selected) sample.records.push_back(corpus.records[idx]);
    std::sort(sample.records.begin(), sample.records.end(),
              [](const WebsiteRecord& a, const WebsiteRecord& b) { return a.id < b.id; });
    return sample;
}

ClassBalance class_balance(const Corpus& corpus) {
    ClassBalance balance;
    for (const auto& record : corpus.records) {
        if (record.label == Label::Phishing) ++balance.phishing;
        else ++balance.benign;
    }
    return balance;
}

} // namespace phishbench
