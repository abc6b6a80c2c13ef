#include "lcds/ingest/markup.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace lcds::ingest::markup {

namespace {

constexpr std::array<std::string_view, 12> void_elements{
    "br", "hr", "img", "meta", "link", "input", "col", "area", "base", "wbr", "source", "param"};

constexpr std::array<std::string_view, 8> implicitly_closed{
    "p", "li", "tr", "td", "th", "option", "dt", "dd"};

constexpr std::array<std::string_view, 28> block_elements{
    "p",  "div", "br", "li", "ul", "ol", "tr", "table", "tbody", "thead", "h1", "h2", "h3", "h4",
    "h5", "h6",  "section", "article", "header", "footer", "body", "html", "dt", "dd", "dl",
    "blockquote", "pre", "hr"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

bool is_name_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '-' || c == '_' || c == ':' || c == '.' || u >= 0x80;
}

class parser {
public:
    parser(std::string_view input, mode m) : in_(input), mode_(m) {}

    node run() {
        node root;
        root.name = "#document";
        stack_.push_back(&root);
        while (pos_ < in_.size()) {
            if (in_[pos_] == '<') {
                markup();
            } else {
                const auto next = in_.find('<', pos_);
                const auto end = next == std::string_view::npos ? in_.size() : next;
                add_text(decode_entities(in_.substr(pos_, end - pos_)));
                pos_ = end;
            }
        }
        if (mode_ == mode::xml && stack_.size() > 1) {
            throw error(error_code::parse_failure, "unclosed element <" + stack_.back()->name + ">");
        }
        return root;
    }

private:
    void add_text(std::string t) {
        if (t.empty()) return;
        auto& kids = stack_.back()->children;
        if (!kids.empty() && kids.back().is_text()) {
            kids.back().text += t;
        } else {
            node n;
            n.text = std::move(t);
            kids.push_back(std::move(n));
        }
    }

    void skip_past(std::string_view terminator) {
        const auto end = in_.find(terminator, pos_);
        if (end == std::string_view::npos) {
            if (mode_ == mode::xml) throw error(error_code::parse_failure, "unterminated markup construct");
            pos_ = in_.size();
            return;
        }
        pos_ = end + terminator.size();
    }

    void markup() {
        const auto rest = in_.substr(pos_);
        if (rest.starts_with("<!--")) {
            skip_past("-->");
        } else if (rest.starts_with("<![CDATA[")) {
            pos_ += 9;
            const auto end = in_.find("]]>", pos_);
            if (end == std::string_view::npos) throw error(error_code::parse_failure, "unterminated CDATA");
            add_text(std::string(in_.substr(pos_, end - pos_)));
            pos_ = end + 3;
        } else if (rest.starts_with("<!") || rest.starts_with("<?")) {
            skip_past(">");
        } else if (rest.starts_with("</")) {
            end_tag();
        } else if (rest.size() > 1 && is_name_char(rest[1])) {
            start_tag();
        } else {
            if (mode_ == mode::xml) throw error(error_code::parse_failure, "stray '<'");
            add_text("<");
            ++pos_;
        }
    }

    std::string read_name() {
        const auto begin = pos_;
        while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
        std::string name(in_.substr(begin, pos_ - begin));
        return mode_ == mode::html ? text::to_lower_ascii(name) : name;
    }

    void skip_ws() {
        while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
    }

    void start_tag() {
        ++pos_;
        node el;
        el.name = read_name();
        bool self_closing = false;
        while (true) {
            skip_ws();
            if (pos_ >= in_.size()) throw error(error_code::parse_failure, "unterminated tag <" + el.name);
            if (in_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (in_.substr(pos_).starts_with("/>")) {
                pos_ += 2;
                self_closing = true;
                break;
            }
            auto key = read_name();
            if (key.empty()) {
                if (mode_ == mode::xml) throw error(error_code::parse_failure, "bad attribute in <" + el.name);
                ++pos_;
                continue;
            }
            skip_ws();
            std::string value;
            if (pos_ < in_.size() && in_[pos_] == '=') {
                ++pos_;
                skip_ws();
                if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
                    const char quote = in_[pos_++];
                    const auto end = in_.find(quote, pos_);
                    if (end == std::string_view::npos) throw error(error_code::parse_failure, "unterminated attribute");
                    value = decode_entities(in_.substr(pos_, end - pos_));
                    pos_ = end + 1;
                } else {
                    const auto begin = pos_;
                    while (pos_ < in_.size() && !std::isspace(static_cast<unsigned char>(in_[pos_])) &&
                           in_[pos_] != '>')
                        ++pos_;
                    value = decode_entities(in_.substr(begin, pos_ - begin));
                }
            } else if (mode_ == mode::xml) {
                throw error(error_code::parse_failure, "attribute without value in <" + el.name);
            }
            el.attributes.emplace_back(std::move(key), std::move(value));
        }

        if (mode_ == mode::html) {
            if (contains(implicitly_closed, el.name) && stack_.back()->name == el.name) stack_.pop_back();
            if (el.name == "script" || el.name == "style") {
                const auto end = find_ci("</" + el.name);
                pos_ = end == std::string_view::npos ? in_.size() : end;
                if (pos_ < in_.size()) skip_past(">");
                return;
            }
            if (contains(void_elements, el.name)) self_closing = true;
        }

        auto& kids = stack_.back()->children;
        kids.push_back(std::move(el));
        if (!self_closing) stack_.push_back(&kids.back());
    }

    std::size_t find_ci(const std::string& needle) const {
        const auto lowered = text::to_lower_ascii(in_.substr(pos_));
        const auto at = lowered.find(needle);
        return at == std::string::npos ? std::string_view::npos : pos_ + at;
    }

    void end_tag() {
        pos_ += 2;
        const auto name = read_name();
        skip_ws();
        if (pos_ >= in_.size() || in_[pos_] != '>') {
            if (mode_ == mode::xml) throw error(error_code::parse_failure, "malformed end tag </" + name);
        } else {
            ++pos_;
        }
        if (mode_ == mode::xml) {
            if (stack_.size() <= 1 || stack_.back()->name != name) {
                throw error(error_code::parse_failure, "mismatched end tag </" + name + ">");
            }
            stack_.pop_back();
            return;
        }
        for (auto it = stack_.size(); it > 1; --it) {
            if (stack_[it - 1]->name == name) {
                stack_.resize(it - 1);
                return;
            }
        }
    }

    std::string_view in_;
    mode mode_;
    std::size_t pos_ = 0;
    // Pointers stay valid: a parent's children only grow while it is the top.
    std::vector<node*> stack_;
};

void collect_text(const node& n, std::string& out) {
    if (n.is_text()) {
        out += n.text;
        return;
    }
    const bool block = is_block_element(n.name);
    if (block) out += '\n';
    for (const auto& c : n.children) collect_text(c, out);
    if (block) out += '\n';
}

}  // namespace

const std::string* node::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

const node* node::first_child(std::string_view element) const {
    for (const auto& c : children) {
        if (c.name == element) return &c;
    }
    return nullptr;
}

const node* node::find(std::string_view element) const {
    for (const auto& c : children) {
        if (c.name == element) return &c;
        if (const auto* hit = c.find(element)) return hit;
    }
    return nullptr;
}

std::string node::inner_text() const {
    std::string out;
    for (const auto& c : children) collect_text(c, out);
    return out;
}

bool is_block_element(std::string_view name) {
    return contains(block_elements, name);
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        const auto entity = s.substr(i + 1, semi - i - 1);
        std::string replacement;
        if (entity == "amp") replacement = "&";
        else if (entity == "lt") replacement = "<";
        else if (entity == "gt") replacement = ">";
        else if (entity == "quot") replacement = "\"";
        else if (entity == "apos") replacement = "'";
        else if (entity == "nbsp") replacement = " ";
        else if (entity.size() > 1 && entity[0] == '#') {
            unsigned long cp = 0;
            const bool hex = entity[1] == 'x' || entity[1] == 'X';
            const auto digits = entity.substr(hex ? 2 : 1);
            const auto [ptr, ec] =
                std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            if (ec == std::errc{} && ptr == digits.data() + digits.size() && cp > 0 && cp <= 0x10FFFF) {
                replacement = text::encode(static_cast<char32_t>(cp));
            }
        }
        if (replacement.empty()) {
            out += s[i++];
            continue;
        }
        out += replacement;
        i = semi + 1;
    }
    return out;
}

node parse(std::string_view input, mode m) {
    return parser(input, m).run();
}

}  // namespace lcds::ingest::markup
