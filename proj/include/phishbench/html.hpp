#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace phishbench::html {

// Minimal error-tolerant HTML document tree. The parser never rejects input;
// anything that does not look like markup becomes text.
struct Node {
    enum class Kind { Document, Element, Text, RawText };

    Kind kind = Kind::Document;
    std::string tag;                                              // lowercase, elements only
    std::vector<std::pair<std::string, std::string>> attributes;  // document order
    std::string text;                                             // Text / RawText payload
    std::vector<std::unique_ptr<Node>> children;

    bool is_element() const { return kind == Kind::Element; }
    const std::string* attribute(const std::string& name) const;
    bool has_attribute(const std::string& name) const;
};

using NodePtr = std::unique_ptr<Node>;

// Lenient parse: unclosed tags are closed at EOF, stray close tags ignored,
// comments and doctype dropped, script/style bodies kept as RawText.
NodePtr parse(const std::string& input);

std::string serialize(const Node& node);

std::size_t element_count(const Node& node);

bool is_void_tag(const std::string& tag);

} // namespace phishbench::html
