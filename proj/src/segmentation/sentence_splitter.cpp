#include "lcds/segmentation/sentence_splitter.hpp"

#include "lcds/core/text.hpp"

namespace lcds::segmentation {

namespace {

bool is_cjk_terminal(char32_t cp) {
    return cp == U'。' || cp == U'！' || cp == U'？';
}

bool is_latin_terminal(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
}

bool is_closer(char32_t cp) {
    switch (cp) {
        case U'"': case U'\'': case U')': case U']':
        case U'”': case U'’': case U'）': case U'」':
        case U'』': case U'】': case U'］':
            return true;
        default:
            return false;
    }
}

}  // namespace

std::vector<byte_span> sentence_spans(std::string_view text) {
    const auto units = text::decode(text);
    std::vector<byte_span> spans;
    const std::size_t n = units.size();

    std::size_t i = 0;
    auto skip_space = [&](std::size_t k) {
        while (k < n && text::is_whitespace(units[k].cp)) ++k;
        return k;
    };
    std::size_t start = skip_space(0);
    i = start;

    while (i < n) {
        const char32_t cp = units[i].cp;
        if (!is_cjk_terminal(cp) && !is_latin_terminal(cp)) {
            ++i;
            continue;
        }
        bool cjk = is_cjk_terminal(cp);
        std::size_t j = i + 1;
        while (j < n && (is_cjk_terminal(units[j].cp) || is_latin_terminal(units[j].cp))) {
            cjk = cjk || is_cjk_terminal(units[j].cp);
            ++j;
        }
        while (j < n && is_closer(units[j].cp)) ++j;

        const bool boundary = cjk || j == n || text::is_whitespace(units[j].cp);
        if (!boundary) {
            i = j;
            continue;
        }
        spans.push_back({units[start].offset, units[j - 1].offset + units[j - 1].length});
        start = skip_space(j);
        i = start;
    }

    if (start < n) {
        std::size_t last = n;
        while (last > start && text::is_whitespace(units[last - 1].cp)) --last;
        spans.push_back({units[start].offset, units[last - 1].offset + units[last - 1].length});
    }
    return spans;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& span : sentence_spans(text)) {
        out.emplace_back(text.substr(span.start, span.size()));
    }
    return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string out;
    bool glue = true;
    for (const auto& s : sentences) {
        if (s.empty()) continue;
        const auto units = text::decode(s);
        // A sentence opening with punctuation would fuse with the previous terminator run.
        const char32_t first = units.front().cp;
        const bool opens_with_mark = is_cjk_terminal(first) || is_latin_terminal(first) || is_closer(first);
        if (!out.empty() && (!glue || opens_with_mark)) out += ' ';
        out += s;

        // Look back past closers for the punctuation that ended the sentence.
        std::size_t k = units.size();
        while (k > 0 && is_closer(units[k - 1].cp)) --k;
        glue = k > 0 && (is_cjk_terminal(units[k - 1].cp) || text::is_cjk(units[k - 1].cp));
    }
    return out;
}

}  // namespace lcds::segmentation
