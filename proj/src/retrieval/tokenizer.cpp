#include "lcds/retrieval/tokenizer.hpp"

#include "lcds/core/text.hpp"

namespace lcds::retrieval {

namespace {

enum class char_class { cjk, word, separator };

char32_t fold_fullwidth(char32_t cp) noexcept {
    if (cp >= 0xFF01 && cp <= 0xFF5E) return cp - 0xFEE0;
    return cp;
}

bool is_separator(char32_t cp) noexcept {
    if (cp < 0x80) return !((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'));
    if (text::is_whitespace(cp)) return true;
    // General punctuation, CJK symbols, fullwidth forms, replacement char.
    return (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFFEF) ||
           (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0xFFFD || cp == 0x00D7 || cp == 0x00F7;
}

char_class classify(char32_t cp) noexcept {
    if (text::is_cjk(cp)) return char_class::cjk;
    return is_separator(cp) ? char_class::separator : char_class::word;
}

void flush_cjk(std::vector<std::string>& run, std::vector<std::string>& out) {
    for (const auto& ch : run) out.push_back(ch);
    for (std::size_t i = 0; i + 1 < run.size(); ++i) out.push_back(run[i] + run[i + 1]);
    run.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> out;
    std::vector<std::string> cjk_run;
    std::string word;

    auto flush_word = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };

    for (const auto& unit : text::decode(input)) {
        const auto cp = fold_fullwidth(unit.cp);
        switch (classify(cp)) {
        case char_class::cjk:
            flush_word();
            cjk_run.push_back(text::encode(cp));
            break;
        case char_class::word:
            flush_cjk(cjk_run, out);
            word += (cp >= 'A' && cp <= 'Z') ? text::encode(cp + 32) : text::encode(cp);
            break;
        case char_class::separator:
            flush_cjk(cjk_run, out);
            flush_word();
            break;
        }
    }
    flush_cjk(cjk_run, out);
    flush_word();
    return out;
}

}  // namespace lcds::retrieval
