/**
 * @file tokenizer.hpp
 * @brief Retrieval tokenizer for mixed Chinese and Latin clinical text
 */

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lcds::retrieval {

/**
 * @brief Splits text into retrieval terms
 *
 * Each maximal run of CJK characters contributes all of its unigrams
 * followed by all of its bigrams. Everything else is split on
 * non-alphanumerics and lowercased; fullwidth letters and digits are folded
 * to ASCII first.
 */
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

}  // namespace lcds::retrieval
