#pragma once

#include "phishbench/tokens.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace phishbench {

// Removal priority for whitelisted tags. Tier1 is kept longest: anchors,
// images, meta and link carry the brand cues and URL evidence the detector
// needs; html/head provide the document skeleton; everything else goes first.
enum class ImportanceTier { Tier1 = 1, Tier2 = 2, Tier3 = 3 };

ImportanceTier tier_of(const std::string& tag);

// Tags retained by the distillation pass. Includes the structural/content
// tags plus the ranked elements (a, img, meta, link, html, head).
const std::set<std::string>& default_whitelist();

struct TruncationConfig {
    double budget_fraction = 0.05; // (0, 1]
    TokenEstimator estimator = TokenEstimator::CharsPerFour;
    std::set<std::string> whitelist = default_whitelist();
    // When set, overrides floor(budget_fraction * tokens_before) as the
    // absolute token budget. Used to re-run truncation on a residue against
    // the original document's budget.
    std::optional<std::size_t> budget_tokens_override;
};

struct DistilledHtml {
    std::string html;
    std::size_t tokens_before = 0;  // measured on the parsed original document
    std::size_t tokens_after = 0;
    std::size_t budget_tokens = 0;
    std::size_t removed_elements = 0;
    bool budget_miss = false;       // residue could not be reduced below budget
};

// One budget-loop removal, with the document state it was chosen from.
// Exposed so tests can audit the selection order against an independent rule
// check.
struct RemovalStep {
    std::string tag;
    ImportanceTier tier;
    std::size_t element_index = 0;  // pre-order index among elements at selection time
    std::string document_before;
};

// Unwraps every element not in the whitelist (children promoted, script/style
// bodies dropped), then removes elements that carry neither text content nor
// any of the href/src/content/name/http-equiv/rel attributes in their subtree.
std::string whitelist_pass(const std::string& input,
                           const std::set<std::string>& whitelist);

// Full distillation: whitelist pass, then least-important-first element
// removal until the token estimate fits the budget. Deterministic; never
// fails — an irreducible document is returned with budget_miss set.
DistilledHtml truncate_html(const std::string& input, const TruncationConfig& cfg,
                            std::vector<RemovalStep>* trace = nullptr);

} // namespace phishbench
