#include "lcds/gateway/structured.hpp"

#include "lcds/core/text.hpp"
#include "lcds/ingest/record.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <map>

namespace lcds::gateway {

std::string_view to_string(structured_shape shape) noexcept {
    switch (shape) {
        case structured_shape::identifier_list: return "identifier-list";
        case structured_shape::label_segment_map: return "label-segment-map";
        case structured_shape::judge_breakdown: return "judge-breakdown";
    }
    return "identifier-list";
}

// =============================================================================
// identifier-list
// =============================================================================

namespace {

std::string strip_quotes(std::string s) {
    for (std::string_view q : {"\"", "'", "“", "”", "‘", "’", "`"}) {
        if (s.starts_with(q)) s.erase(0, q.size());
        if (s.ends_with(q)) s.erase(s.size() - q.size());
    }
    return text::trim(s);
}

}  // namespace

std::optional<std::vector<std::string>> parse_identifier_list(std::string_view reply) {
    const auto open = reply.find('[');
    const auto close = reply.rfind(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    const auto inner = reply.substr(open + 1, close - open - 1);
    if (inner.find('[') != std::string_view::npos || inner.find(']') != std::string_view::npos) {
        return std::nullopt;
    }

    std::vector<std::string> ids;
    if (text::trim(inner).empty()) return ids;

    std::size_t start = 0;
    while (true) {
        const auto comma = inner.find(',', start);
        const auto piece = strip_quotes(text::trim(inner.substr(start, comma - start)));
        if (piece.empty() || !ingest::sentence_id::parse(piece)) return std::nullopt;
        ids.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return ids;
}

// =============================================================================
// label-segment-map
// =============================================================================

std::optional<label_segments> parse_label_segment_map(std::string_view reply) {
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    const auto j = nlohmann::ordered_json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;

    label_segments out;
    for (const auto& [label, value] : j.items()) {
        if (text::trim(label).empty()) return std::nullopt;
        if (value.is_string()) {
            out.emplace_back(label, value.get<std::string>());
        } else if (value.is_array()) {
            for (const auto& v : value) {
                if (!v.is_string()) return std::nullopt;
                out.emplace_back(label, v.get<std::string>());
            }
        } else {
            return std::nullopt;
        }
    }
    return out;
}

// =============================================================================
// judge-breakdown
// =============================================================================

namespace {

struct dimension_spec {
    std::string_view key;
    int max_points;
    double judge_output::*slot;
};

constexpr std::array<dimension_spec, 4> judge_dimensions{{
    {"information accuracy", 40, &judge_output::information_accuracy},
    {"medical completeness", 35, &judge_output::medical_completeness},
    {"professional standardization", 15, &judge_output::professional_standardization},
    {"clinical practicality", 10, &judge_output::clinical_practicality},
}};

class judge_parser {
public:
    explicit judge_parser(std::string_view s) : s_(s) {}

    std::optional<judge_output> run() {
        judge_output out;
        bool have_score = false;
        bool have_breakdown = false;

        skip_ws();
        if (!eat("{")) return std::nullopt;
        while (true) {
            skip_ws();
            if (eat("}")) break;
            auto key = read_key();
            if (!key) return std::nullopt;
            skip_ws();
            eat(":");
            skip_ws();
            if (*key == "score") {
                if (have_score) return std::nullopt;
                auto v = read_number(100);
                if (!v) return std::nullopt;
                out.score = *v;
                have_score = true;
            } else if (*key == "breakdown") {
                if (have_breakdown || !read_breakdown(out)) return std::nullopt;
                have_breakdown = true;
            } else {
                return std::nullopt;
            }
            skip_ws();
            if (eat(",")) continue;
            skip_ws();
            if (eat("}")) break;
            return std::nullopt;
        }
        if (!have_score || !have_breakdown) return std::nullopt;
        return out;
    }

private:
    bool read_breakdown(judge_output& out) {
        if (!eat("{")) return false;
        std::map<std::string_view, bool> seen;
        while (true) {
            skip_ws();
            if (eat("}")) break;
            auto key = read_key();
            if (!key) return false;
            const auto lowered = text::to_lower_ascii(*key);
            const dimension_spec* dim = nullptr;
            for (const auto& d : judge_dimensions) {
                if (d.key == lowered) dim = &d;
            }
            if (dim == nullptr || seen[dim->key]) return false;
            seen[dim->key] = true;
            skip_ws();
            eat(":");
            skip_ws();
            auto v = read_number(dim->max_points);
            if (!v) return false;
            out.*(dim->slot) = *v;
            skip_ws();
            if (eat(",")) continue;
            skip_ws();
            if (eat("}")) break;
            return false;
        }
        return seen.size() == judge_dimensions.size();
    }

    std::optional<std::string> read_key() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> quotes{{
            {"``", "''"}, {"\"", "\""}, {"“", "”"}, {"'", "'"}, {"‘", "’"},
        }};
        for (const auto& [open, close] : quotes) {
            if (!s_.substr(pos_).starts_with(open)) continue;
            const auto begin = pos_ + open.size();
            const auto end = s_.find(close, begin);
            if (end == std::string_view::npos) return std::nullopt;
            pos_ = end + close.size();
            return text::trim(s_.substr(begin, end - begin));
        }
        return std::nullopt;
    }

    /// Number, optionally in [brackets], optionally followed by "/max".
    std::optional<double> read_number(int expected_max) {
        const bool bracketed = eat("[");
        skip_ws();
        const auto begin = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        double value = 0;
        const auto token = s_.substr(begin, pos_ - begin);
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
        skip_ws();
        // "[n]/max" as the rubric writes it, or "[n/max]".
        if (bracketed && !read_max(expected_max)) return std::nullopt;
        if (bracketed && !eat("]")) return std::nullopt;
        skip_ws();
        if (!read_max(expected_max)) return std::nullopt;
        return value;
    }

    /// Optional "/max" suffix; false when present but not equal to expected_max.
    bool read_max(int expected_max) {
        if (!eat("/")) return true;
        skip_ws();
        const auto mb = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        int max = 0;
        const auto digits = s_.substr(mb, pos_ - mb);
        const auto [p2, e2] = std::from_chars(digits.data(), digits.data() + digits.size(), max);
        skip_ws();
        return !digits.empty() && e2 == std::errc{} && max == expected_max;
    }

    void skip_ws() {
        while (pos_ < s_.size()) {
            const auto units = text::decode(s_.substr(pos_, std::min<std::size_t>(4, s_.size() - pos_)));
            if (units.empty() || !text::is_whitespace(units.front().cp)) return;
            pos_ += units.front().length;
        }
    }

    bool eat(std::string_view token) {
        if (!s_.substr(pos_).starts_with(token)) return false;
        pos_ += token.size();
        return true;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::optional<judge_output> parse_judge_output(std::string_view reply) {
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    return judge_parser(reply.substr(open, close - open + 1)).run();
}

}  // namespace lcds::gateway
