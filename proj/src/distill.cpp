#include "phishbench/distill.hpp"

#include "phishbench/html.hpp"
#include "phishbench/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace phishbench {

namespace {

using html::Node;

// Attributes that make an otherwise text-free element worth keeping. These
// are exactly the signals carried by the Tier1 tags.
const std::array<const char*, 6> kSignalAttributes = {
    "href", "src", "content", "name", "http-equiv", "rel",
};

// Unwraps non-whitelisted elements in place. Children take the removed
// element's position; RawText payloads (script/style bodies) are dropped
// rather than spliced into the document text. Returns elements removed.
std::size_t unwrap_pass(Node& node, const std::set<std::string>& whitelist) {
    std::size_t removed = 0;
    std::size_t i = 0;
    while (i < node.children.size()) {
        Node* child = node.children[i].get();
        if (!child->is_element()) {
            if (child->kind == Node::Kind::RawText) {
                node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            ++i;
            continue;
        }
        removed += unwrap_pass(*child, whitelist);
        if (whitelist.count(child->tag)) {
            ++i;
            continue;
        }
        // Splice the (already processed) grandchildren into our child list.
        std::vector<html::NodePtr> grandchildren = std::move(child->children);
        node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i));
        ++removed;
        std::size_t inserted = grandchildren.size();
        node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(i),
                             std::make_move_iterator(grandchildren.begin()),
                             std::make_move_iterator(grandchildren.end()));
        i += inserted;
    }
    return removed;
}

bool has_signal_attribute(const Node& node) {
    for (const char* attr : kSignalAttributes) {
        if (node.has_attribute(attr)) return true;
    }
    return false;
}

// Post-order empty-element removal. An element is empty when its subtree has
// no non-whitespace text and no signal attribute anywhere. Returns whether
// the (remaining) subtree carries content; increments `removed` per element.
bool prune_empty(Node& node, std::size_t& removed) {
    bool has_content = false;
    if (node.is_element() && has_signal_attribute(node)) has_content = true;

    std::size_t i = 0;
    while (i < node.children.size()) {
        Node* child = node.children[i].get();
        if (child->kind == Node::Kind::Text || child->kind == Node::Kind::RawText) {
            if (!is_blank(child->text)) has_content = true;
            ++i;
            continue;
        }
        bool child_content = prune_empty(*child, removed);
        if (child->is_element() && !child_content) {
            removed += html::element_count(*child);
            node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i));
            continue;
        }
        has_content = has_content || child_content;
        ++i;
    }
    return has_content;
}

struct Candidate {
    Node* parent;
    std::size_t child_index;
    std::size_t order;  // pre-order element index
    ImportanceTier tier;
    std::string tag;
};

void collect_candidates(Node& node, std::vector<Candidate>& out, std::size_t& counter) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        Node* child = node.children[i].get();
        if (!child->is_element()) continue;
        out.push_back({&node, i, counter++, tier_of(child->tag), child->tag});
        collect_candidates(*child, out, counter);
    }
}

// Selects the next element to drop: lowest-importance tier first; within a
// tier the bottom-most element whose tag class keeps at least one other
// occurrence, falling back to the bottom-most element when every class in
// the tier is down to a single occurrence.
const Candidate* select_victim(const std::vector<Candidate>& candidates) {
    for (ImportanceTier tier : {ImportanceTier::Tier3, ImportanceTier::Tier2, ImportanceTier::Tier1}) {
        std::map<std::string, std::size_t> class_counts;
        const Candidate* fallback = nullptr;
        for (const Candidate& c : candidates) {
            if (c.tier != tier) continue;
            ++class_counts[c.tag];
            if (!fallback || c.order > fallback->order) fallback = &c;
        }
        if (!fallback) continue;
        const Candidate* best = nullptr;
        for (const Candidate& c : candidates) {
            if (c.tier != tier || class_counts[c.tag] < 2) continue;
            if (!best || c.order > best->order) best = &c;
        }
        return best ? best : fallback;
    }
    return nullptr;
}

std::size_t tokens_of(const Node& doc, TokenEstimator estimator) {
    return count_tokens(html::serialize(doc), estimator);
}

} // namespace

ImportanceTier tier_of(const std::string& tag) {
    if (tag == "a" || tag == "img" || tag == "meta" || tag == "link")
        return ImportanceTier::Tier1;
    if (tag == "html" || tag == "head") return ImportanceTier::Tier2;
    return ImportanceTier::Tier3;
}

const std::set<std::string>& default_whitelist() {
    static const std::set<std::string> whitelist = {
        "head", "title", "meta", "body", "h1", "h2", "h3", "h4", "h5", "h6",
        "p",    "strong", "a",   "img",  "hr", "table", "tbody", "tr", "th",
        "td",   "ol",     "ul",  "li",   "ruby", "label",
        // Ranked elements retained alongside the content whitelist.
        "html", "link",
    };
    return whitelist;
}

std::string whitelist_pass(const std::string& input,
                           const std::set<std::string>& whitelist) {
    html::NodePtr doc = html::parse(input);
    std::size_t removed = 0;
    unwrap_pass(*doc, whitelist);
    prune_empty(*doc, removed);
    return html::serialize(*doc);
}

DistilledHtml truncate_html(const std::string& input, const TruncationConfig& cfg,
                            std::vector<RemovalStep>* trace) {
    DistilledHtml result;
    html::NodePtr doc = html::parse(input);

    const std::size_t initial_elements = html::element_count(*doc);
    result.tokens_before = tokens_of(*doc, cfg.estimator);
    result.budget_tokens = cfg.budget_tokens_override
        ? *cfg.budget_tokens_override
        : static_cast<std::size_t>(std::floor(cfg.budget_fraction *
                                              static_cast<double>(result.tokens_before)));

    std::size_t removed = 0;
    unwrap_pass(*doc, cfg.whitelist);
    prune_empty(*doc, removed);

    std::size_t tokens = tokens_of(*doc, cfg.estimator);
    while (tokens > result.budget_tokens) {
        std::vector<Candidate> candidates;
        std::size_t counter = 0;
        collect_candidates(*doc, candidates, counter);
        const Candidate* victim = select_victim(candidates);
        if (!victim) {
            result.budget_miss = true;
            break;
        }
        if (trace) {
            trace->push_back({victim->tag, victim->tier, victim->order,
                              html::serialize(*doc)});
        }
        victim->parent->children.erase(victim->parent->children.begin() +
                                       static_cast<std::ptrdiff_t>(victim->child_index));
        tokens = tokens_of(*doc, cfg.estimator);
    }

    result.html = html::serialize(*doc);
    result.tokens_after = tokens;
    result.removed_elements = initial_elements - html::element_count(*doc);
    return result;
}

} // namespace phishbench
