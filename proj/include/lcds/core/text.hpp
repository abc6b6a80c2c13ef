/**
 * @file text.hpp
 * @brief UTF-8 decoding and whitespace helpers
 *
 * All lcds text is UTF-8 in std::string. Offsets reported anywhere in the
 * library are byte offsets into that encoding.
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::text {

/// One decoded code point and where it sits in the source bytes.
struct code_unit {
    char32_t cp = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Decodes UTF-8. Invalid sequences decode to U+FFFD, one byte at a time.
[[nodiscard]] std::vector<code_unit> decode(std::string_view s);

[[nodiscard]] std::string encode(char32_t cp);

[[nodiscard]] bool is_whitespace(char32_t cp) noexcept;

/// Han ideographs, kana and hangul syllables.
[[nodiscard]] bool is_cjk(char32_t cp) noexcept;

[[nodiscard]] bool contains_cjk(std::string_view s);

[[nodiscard]] std::string trim(std::string_view s);

/// Trims and collapses every whitespace run to one ASCII space.
[[nodiscard]] std::string collapse_whitespace(std::string_view s);

/// Removes every whitespace code point.
[[nodiscard]] std::string strip_whitespace(std::string_view s);

[[nodiscard]] std::string to_lower_ascii(std::string_view s);

/**
 * @brief Whitespace-free copy of a string with a back-map to source offsets
 *
 * offsets[i] is the source byte offset of byte i of text; offsets has one
 * extra trailing element holding the source end offset of the last kept
 * code point.
 */
struct stripped_text {
    std::string text;
    std::vector<std::size_t> offsets;
};

[[nodiscard]] stripped_text strip_with_offsets(std::string_view s);

/// Substring test that ignores all whitespace on both sides.
[[nodiscard]] bool contains_ignoring_whitespace(std::string_view haystack,
                                                std::string_view needle);

/// Equality modulo whitespace.
[[nodiscard]] bool equal_ignoring_whitespace(std::string_view a, std::string_view b);

[[nodiscard]] bool starts_with_cjk(std::string_view s);
[[nodiscard]] bool ends_with_cjk(std::string_view s);

}  // namespace lcds::text
