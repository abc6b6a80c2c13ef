/**
 * @file markup.hpp
 * @brief Small tree parser for the HTML and XML payloads EMR systems export
 *
 * HTML mode is forgiving (void elements, implied closes, stray end tags);
 * XML mode rejects mismatched or unclosed elements.
 */

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcds::ingest::markup {

enum class mode { html, xml };

struct node {
    /// Element name, lowercased in HTML mode. Empty for text nodes.
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    /// Entity-decoded character data, text nodes only.
    std::string text;
    std::vector<node> children;

    [[nodiscard]] bool is_text() const noexcept { return name.empty(); }
    [[nodiscard]] const std::string* attribute(std::string_view key) const;
    [[nodiscard]] const node* first_child(std::string_view element) const;
    /// Depth-first search for the first element with this name.
    [[nodiscard]] const node* find(std::string_view element) const;
    /// All descendant text; block boundaries become newlines.
    [[nodiscard]] std::string inner_text() const;
};

/// Parses into a synthetic root named "#document". Throws lcds::error(parse_failure).
[[nodiscard]] node parse(std::string_view input, mode m);

[[nodiscard]] std::string decode_entities(std::string_view s);

[[nodiscard]] bool is_block_element(std::string_view name);

}  // namespace lcds::ingest::markup
