#include "lcds/core/text.hpp"

namespace lcds::text {

std::vector<code_unit> decode(std::string_view s) {
    std::vector<code_unit> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto lead = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (lead < 0x80) {
            len = 1;
            cp = lead;
        } else if ((lead & 0xE0) == 0xC0) {
            len = 2;
            cp = lead & 0x1F;
        } else if ((lead & 0xF0) == 0xE0) {
            len = 3;
            cp = lead & 0x0F;
        } else if ((lead & 0xF8) == 0xF0) {
            len = 4;
            cp = lead & 0x07;
        }
        bool valid = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; valid && k < len; ++k) {
            const auto cont = static_cast<unsigned char>(s[i + k]);
            if ((cont & 0xC0) != 0x80) {
                valid = false;
            } else {
                cp = (cp << 6) | (cont & 0x3F);
            }
        }
        if (!valid) {
            out.push_back({U'\uFFFD', i, 1});
            ++i;
            continue;
        }
        out.push_back({cp, i, len});
        i += len;
    }
    return out;
}

std::string encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

bool is_whitespace(char32_t cp) noexcept {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case U'\u00A0': case U'\u3000': case U'\u2009': case U'\u200B': case U'\uFEFF':
            return true;
        default:
            return false;
    }
}

bool is_cjk(char32_t cp) noexcept {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0x20000 && cp <= 0x2A6DF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
           (cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0xAC00 && cp <= 0xD7AF);
}

bool contains_cjk(std::string_view s) {
    for (const auto& u : decode(s)) {
        if (is_cjk(u.cp)) return true;
    }
    return false;
}

std::string trim(std::string_view s) {
    const auto units = decode(s);
    std::size_t first = 0;
    std::size_t last = units.size();
    while (first < last && is_whitespace(units[first].cp)) ++first;
    while (last > first && is_whitespace(units[last - 1].cp)) --last;
    if (first == last) return {};
    const auto begin = units[first].offset;
    const auto end = units[last - 1].offset + units[last - 1].length;
    return std::string(s.substr(begin, end - begin));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (const auto& u : decode(s)) {
        if (is_whitespace(u.cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out.append(s.substr(u.offset, u.length));
    }
    return out;
}

std::string strip_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const auto& u : decode(s)) {
        if (!is_whitespace(u.cp)) out.append(s.substr(u.offset, u.length));
    }
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

stripped_text strip_with_offsets(std::string_view s) {
    stripped_text out;
    std::size_t end = 0;
    for (const auto& u : decode(s)) {
        if (is_whitespace(u.cp)) continue;
        for (std::size_t k = 0; k < u.length; ++k) {
            out.text += s[u.offset + k];
            out.offsets.push_back(u.offset + k);
        }
        end = u.offset + u.length;
    }
    out.offsets.push_back(end);
    return out;
}

bool contains_ignoring_whitespace(std::string_view haystack, std::string_view needle) {
    const auto n = strip_whitespace(needle);
    if (n.empty()) return false;
    return strip_whitespace(haystack).find(n) != std::string::npos;
}

bool equal_ignoring_whitespace(std::string_view a, std::string_view b) {
    return strip_whitespace(a) == strip_whitespace(b);
}

bool starts_with_cjk(std::string_view s) {
    const auto units = decode(s);
    return !units.empty() && is_cjk(units.front().cp);
}

bool ends_with_cjk(std::string_view s) {
    const auto units = decode(s);
    if (units.empty()) return false;
    const auto cp = units.back().cp;
    // CJK punctuation and fullwidth forms also attach without a space
    return is_cjk(cp) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFFEF);
}

}  // namespace lcds::text
