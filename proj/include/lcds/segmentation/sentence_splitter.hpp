/**
 * @file sentence_splitter.hpp
 * @brief Rule-based sentence segmentation for mixed CJK and Latin text
 *
 * Boundaries fall after 。！？ unconditionally and after . ! ? only when the
 * next code point is whitespace or the end of input, so decimals such as
 * "3.5" never split. Trailing closing quotes and brackets stay attached to
 * the sentence they close.
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::segmentation {

/// Half-open byte range [start, end) into a UTF-8 string.
struct byte_span {
    std::size_t start = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const byte_span&, const byte_span&) = default;
};

/// Sentence spans, trimmed of surrounding whitespace, in order.
[[nodiscard]] std::vector<byte_span> sentence_spans(std::string_view text);

[[nodiscard]] std::vector<std::string> split_sentences(std::string_view text);

/**
 * @brief Joins sentences back into running text
 *
 * Sentences closed by CJK punctuation are concatenated directly; everything
 * else gets a single space so Latin terminators stay boundaries on re-split.
 */
[[nodiscard]] std::string join_sentences(const std::vector<std::string>& sentences);

}  // namespace lcds::segmentation
