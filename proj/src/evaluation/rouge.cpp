#include "lcds/evaluation/rouge.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"

#include <algorithm>

namespace lcds::evaluation {

std::string_view to_string(rouge_tokenizer tokenizer) noexcept {
    switch (tokenizer) {
        case rouge_tokenizer::automatic: return "auto";
        case rouge_tokenizer::character: return "char";
        case rouge_tokenizer::word: return "word";
    }
    return "auto";
}

rouge_tokenizer parse_rouge_tokenizer(std::string_view name) {
    if (name == "auto") return rouge_tokenizer::automatic;
    if (name == "char") return rouge_tokenizer::character;
    if (name == "word") return rouge_tokenizer::word;
    throw error(error_code::invalid_argument, "unknown tokenizer '" + std::string(name) + "'");
}

std::vector<std::string> rouge_tokens(std::string_view input, rouge_tokenizer tokenizer) {
    if (tokenizer == rouge_tokenizer::automatic) {
        tokenizer = text::contains_cjk(input) ? rouge_tokenizer::character : rouge_tokenizer::word;
    }
    std::vector<std::string> out;
    std::string word;
    for (const auto& u : text::decode(input)) {
        const auto piece = input.substr(u.offset, u.length);
        if (text::is_whitespace(u.cp)) {
            if (!word.empty()) out.push_back(std::move(word));
            word.clear();
        } else if (tokenizer == rouge_tokenizer::character) {
            out.emplace_back(piece);
        } else {
            word += piece;
        }
    }
    if (!word.empty()) out.push_back(std::move(word));
    return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto& outer = a.size() >= b.size() ? a : b;
    const auto& inner = a.size() >= b.size() ? b : a;
    std::vector<std::size_t> row(inner.size() + 1, 0);
    for (const auto& x : outer) {
        std::size_t diagonal = 0;
        for (std::size_t j = 1; j <= inner.size(); ++j) {
            const auto above = row[j];
            row[j] = x == inner[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
            diagonal = above;
        }
    }
    return row[inner.size()];
}

rouge_score rouge_l_tokens(const std::vector<std::string>& generated, const std::vector<std::string>& reference) {
    rouge_score out;
    out.lcs = lcs_length(generated, reference);
    if (out.lcs == 0) return out;
    out.precision = static_cast<double>(out.lcs) / static_cast<double>(generated.size());
    out.recall = static_cast<double>(out.lcs) / static_cast<double>(reference.size());
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

rouge_score rouge_l(std::string_view generated, std::string_view reference, rouge_tokenizer tokenizer) {
    if (tokenizer == rouge_tokenizer::automatic) {
        tokenizer = text::contains_cjk(generated) || text::contains_cjk(reference) ? rouge_tokenizer::character
                                                                                    : rouge_tokenizer::word;
    }
    const auto ref = rouge_tokens(reference, tokenizer);
    if (ref.empty()) throw error(error_code::empty_reference, "EmptyReference");
    auto out = rouge_l_tokens(rouge_tokens(generated, tokenizer), ref);
    out.tokenizer = tokenizer;
    return out;
}

}  // namespace lcds::evaluation
