/**
 * @file rouge.hpp
 * @brief Longest common subsequence and ROUGE-L
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::evaluation {

enum class rouge_tokenizer {
    /// Characters when either text contains CJK, words otherwise.
    automatic,
    /// Every non-whitespace code point.
    character,
    /// Whitespace-separated words.
    word,
};

[[nodiscard]] std::string_view to_string(rouge_tokenizer tokenizer) noexcept;
/// "auto", "char" or "word". @throws lcds::error invalid_argument
[[nodiscard]] rouge_tokenizer parse_rouge_tokenizer(std::string_view name);

[[nodiscard]] std::vector<std::string> rouge_tokens(std::string_view text, rouge_tokenizer tokenizer);

/// Classic O(|a|·|b|) dynamic programme, O(min) memory.
[[nodiscard]] std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct rouge_score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t lcs = 0;
    /// The tokenizer actually used (never automatic).
    rouge_tokenizer tokenizer = rouge_tokenizer::word;
};

/// @throws lcds::error empty_reference
[[nodiscard]] rouge_score rouge_l(std::string_view generated, std::string_view reference,
                                  rouge_tokenizer tokenizer = rouge_tokenizer::automatic);

/// F1 from token sequences; both may be empty (score 0).
[[nodiscard]] rouge_score rouge_l_tokens(const std::vector<std::string>& generated,
                                         const std::vector<std::string>& reference);

}  // namespace lcds::evaluation
