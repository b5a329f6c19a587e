#pragma once

#include "phishbench/corpus.hpp"
#include "phishbench/distill.hpp"
#include "phishbench/tokens.hpp"

#include <filesystem>
#include <string>

namespace phishbench {

// Flat analysis prompt with the placeholders {original_url}, {html_text} and
// {original_character_count}, each required exactly once. The JSON braces in
// the output-format section are plain text; only the three named placeholders
// are substituted.
class PromptTemplate {
public:
    static PromptTemplate from_string(std::string body);
    static PromptTemplate load(const std::filesystem::path& path);
    // The built-in default template shipped with the harness (also available
    // as data/prompt_template.txt).
    static PromptTemplate paper_default();

    const std::string& body() const { return body_; }

private:
    explicit PromptTemplate(std::string body) : body_(std::move(body)) {}
    std::string body_;
};

struct RenderedPrompt {
    std::string text;
    std::size_t token_estimate = 0;
    std::string website_id;
};

RenderedPrompt render(const PromptTemplate& tmpl, const WebsiteRecord& record,
                      const DistilledHtml& distilled,
                      TokenEstimator estimator = TokenEstimator::CharsPerFour);

} // namespace phishbench
