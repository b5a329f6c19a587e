#include "phishbench/html.hpp"

#include "phishbench/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace phishbench::html {

namespace {

const std::unordered_set<std::string> kVoidTags = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
};

// Content is character data, not markup.
const std::unordered_set<std::string> kRawTextTags = {"script", "style"};

// Start tags that implicitly close an open <p>.
const std::unordered_set<std::string> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
    "main", "nav", "ol", "p", "pre", "section", "table", "ul",
};

bool is_tag_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_tag_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':';
}

// Siblings whose start tag auto-closes an open element with tag `open`.
bool auto_closes(const std::string& open, const std::string& incoming) {
    if (open == "p") return kClosesParagraph.count(incoming) > 0;
    if (open == "li") return incoming == "li";
    if (open == "td" || open == "th")
        return incoming == "td" || incoming == "th" || incoming == "tr";
    if (open == "tr") return incoming == "tr";
    if (open == "option") return incoming == "option";
    return false;
}

std::string decode_attr_value(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw.compare(i, 6, "&quot;") == 0) {
            out += '"';
            i += 6;
        } else if (raw.compare(i, 5, "&amp;") == 0) {
            out += '&';
            i += 5;
        } else {
            out += raw[i];
            ++i;
        }
    }
    return out;
}

std::string encode_attr_value(const std::string& value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        if (c == '&') out += "&amp;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& input) : s_(input) {}

    NodePtr run() {
        auto doc = std::make_unique<Node>();
        doc->kind = Node::Kind::Document;
        stack_.push_back(doc.get());
        while (pos_ < s_.size()) {
            step();
        }
        flush_text();
        return doc;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    std::vector<Node*> stack_;
    std::string pending_text_;

    Node* top() { return stack_.back(); }

    void flush_text() {
        if (pending_text_.empty()) return;
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::Text;
        node->text = std::move(pending_text_);
        pending_text_.clear();
        top()->children.push_back(std::move(node));
    }

    void step() {
        char c = s_[pos_];
        if (c != '<') {
            pending_text_ += c;
            ++pos_;
            return;
        }
        if (pos_ + 1 >= s_.size()) {
            pending_text_ += c;
            ++pos_;
            return;
        }
        char n = s_[pos_ + 1];
        if (n == '!' || n == '?') {
            flush_text();
            skip_declaration();
        } else if (n == '/') {
            flush_text();
            close_tag();
        } else if (is_tag_name_start(n)) {
            flush_text();
            open_tag();
        } else {
            // Bare '<' in text.
            pending_text_ += c;
            ++pos_;
        }
    }

    void skip_declaration() {
        if (s_.compare(pos_, 4, "<!--") == 0) {
            std::size_t end = s_.find("-->", pos_ + 4);
            pos_ = (end == std::string::npos) ? s_.size() : end + 3;
            return;
        }
        // <!DOCTYPE ...>, <![CDATA[...]]>, <?xml ...?>
        std::size_t end = s_.find('>', pos_);
        pos_ = (end == std::string::npos) ? s_.size() : end + 1;
    }

    std::string read_tag_name() {
        std::string name;
        while (pos_ < s_.size() && is_tag_name_char(s_[pos_])) {
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(s_[pos_])));
            ++pos_;
        }
        return name;
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    void close_tag() {
        pos_ += 2; // "</"
        std::string name = read_tag_name();
        std::size_t end = s_.find('>', pos_);
        pos_ = (end == std::string::npos) ? s_.size() : end + 1;
        // Pop to the matching open element; ignore the tag if none is open.
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    void open_tag() {
        ++pos_; // '<'
        std::string name = read_tag_name();
        auto elem = std::make_unique<Node>();
        elem->kind = Node::Kind::Element;
        elem->tag = name;

        bool self_closing = false;
        while (pos_ < s_.size()) {
            skip_space();
            if (pos_ >= s_.size()) break;
            char c = s_[pos_];
            if (c == '>') {
                ++pos_;
                break;
            }
            if (c == '/') {
                ++pos_;
                if (pos_ < s_.size() && s_[pos_] == '>') {
                    self_closing = true;
                    ++pos_;
                    break;
                }
                continue;
            }
            read_attribute(*elem);
        }

        while (stack_.size() > 1 && auto_closes(top()->tag, name)) {
            stack_.pop_back();
        }

        Node* raw = elem.get();
        top()->children.push_back(std::move(elem));

        if (kVoidTags.count(name) || self_closing) return;

        if (kRawTextTags.count(name)) {
            read_raw_text(*raw, name);
            return;
        }
        stack_.push_back(raw);
    }

    void read_attribute(Node& elem) {
        std::string attr_name;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == '>' || c == '/') break;
            attr_name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            ++pos_;
        }
        if (attr_name.empty()) {
            ++pos_; // unparseable byte inside the tag; skip it
            return;
        }
        skip_space();
        std::string value;
        if (pos_ < s_.size() && s_[pos_] == '=') {
            ++pos_;
            skip_space();
            if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
                char quote = s_[pos_++];
                std::size_t end = s_.find(quote, pos_);
                if (end == std::string::npos) {
                    value = s_.substr(pos_);
                    pos_ = s_.size();
                } else {
                    value = s_.substr(pos_, end - pos_);
                    pos_ = end + 1;
                }
            } else {
                while (pos_ < s_.size()) {
                    char c = s_[pos_];
                    if (std::isspace(static_cast<unsigned char>(c)) || c == '>') break;
                    value += c;
                    ++pos_;
                }
            }
        }
        elem.attributes.emplace_back(attr_name, decode_attr_value(value));
    }

    void read_raw_text(Node& elem, const std::string& name) {
        std::string close = "</" + name;
        std::size_t body_start = pos_;
        std::size_t found = std::string::npos;
        std::size_t search = pos_;
        while (true) {
            found = s_.find(close, search);
            if (found == std::string::npos) break;
            std::size_t after = found + close.size();
            if (after >= s_.size() || s_[after] == '>' ||
                std::isspace(static_cast<unsigned char>(s_[after]))) {
                break;
            }
            search = found + 1;
        }
        std::string body;
        if (found == std::string::npos) {
            body = s_.substr(body_start);
            pos_ = s_.size();
        } else {
            body = s_.substr(body_start, found - body_start);
            std::size_t end = s_.find('>', found);
            pos_ = (end == std::string::npos) ? s_.size() : end + 1;
        }
        if (!body.empty()) {
            auto raw_node = std::make_unique<Node>();
            raw_node->kind = Node::Kind::RawText;
            raw_node->text = std::move(body);
            elem.children.push_back(std::move(raw_node));
        }
    }
};

void serialize_into(const Node& node, std::string& out) {
    switch (node.kind) {
    case Node::Kind::Document:
        for (const auto& child : node.children) serialize_into(*child, out);
        return;
    case Node::Kind::Text:
    case Node::Kind::RawText:
        out += node.text;
        return;
    case Node::Kind::Element:
        out += '<';
        out += node.tag;
        for (const auto& [name, value] : node.attributes) {
            out += ' ';
            out += name;
            out += "=\"";
            out += encode_attr_value(value);
            out += '"';
        }
        out += '>';
        if (is_void_tag(node.tag)) return;
        for (const auto& child : node.children) serialize_into(*child, out);
        out += "</";
        out += node.tag;
        out += '>';
        return;
    }
}

} // namespace

const std::string* Node::attribute(const std::string& name) const {
    for (const auto& [attr_name, value] : attributes) {
        if (attr_name == name) return &value;
    }
    return nullptr;
}

bool Node::has_attribute(const std::string& name) const {
    return attribute(name) != nullptr;
}

NodePtr parse(const std::string& input) {
    return Parser(input).run();
}

std::string serialize(const Node& node) {
    std::string out;
    serialize_into(node, out);
    return out;
}

std::size_t element_count(const Node& node) {
    std::size_t count = node.is_element() ? 1 : 0;
    for (const auto& child : node.children) count += element_count(*child);
    return count;
}

bool is_void_tag(const std::string& tag) {
    return kVoidTags.count(tag) > 0;
}

} // namespace phishbench::html
