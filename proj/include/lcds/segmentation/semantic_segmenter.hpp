/**
 * @file semantic_segmenter.hpp
 * @brief Labelled segmentation of long summary fields
 *
 * A course-of-treatment paragraph is cut into labelled pieces (surgery,
 * chemotherapy, pathology, discharge details, ...) so each piece can be
 * used as its own retrieval query. A semantic-capable provider proposes the
 * pieces in-context; its output is accepted only if every piece is found in
 * the input text. Otherwise, and whenever no capable provider is present,
 * a cue-term lexicon labels sentence by sentence.
 *
 * Segments never split a sentence: provider spans are snapped to sentence
 * boundaries before they are returned.
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/segmentation/sentence_splitter.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcds::segmentation {

struct semantic_segment {
    std::string label;
    std::string text;
    /// Byte span into the segmented text; text == input.substr(span).
    byte_span span;

    friend bool operator==(const semantic_segment&, const semantic_segment&) = default;
};

/// Segment as proposed by a provider, before alignment.
struct raw_segment {
    std::string label;
    std::string text;
};

struct segment_lexicon {
    /// Labels in priority order, each with its cue terms.
    std::vector<std::pair<std::string, std::vector<std::string>>> labels;
    std::string default_label = "other";

    [[nodiscard]] static segment_lexicon defaults();
    [[nodiscard]] static segment_lexicon from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::ordered_json to_json() const;

    /// Label with the most cue hits; ties go to the earlier label.
    [[nodiscard]] std::string classify(std::string_view sentence) const;
};

struct segmenter_options {
    segment_lexicon lexicon = segment_lexicon::defaults();
    /// Must contain "{labels}" and "{text}".
    std::string prompt_template = default_prompt_template();
    /// Take the lexicon path when provider output is rejected; throw otherwise.
    bool fallback_on_reject = true;

    [[nodiscard]] static std::string default_prompt_template();
};

/**
 * @brief Places provider segments onto the input text
 *
 * Each segment is located by exact substring search, then by a
 * whitespace-insensitive search. Matches are taken left to right, preferring
 * the first occurrence at or after the previous match. Segments that cannot
 * be located, or that overlap an earlier one, are dropped with a warning.
 */
[[nodiscard]] std::vector<semantic_segment> align_segments(const std::vector<raw_segment>& segments,
                                                           std::string_view field_text,
                                                           std::vector<std::string>* warnings = nullptr);

/// Whitespace-insensitive location of needle in haystack at or after `from`.
[[nodiscard]] std::optional<byte_span> find_ignoring_whitespace(std::string_view haystack,
                                                                std::string_view needle, std::size_t from = 0);

/// Deterministic fallback: label per sentence, adjacent equal labels merged.
[[nodiscard]] std::vector<semantic_segment> lexicon_segment(std::string_view field_text,
                                                            const segment_lexicon& lexicon);

/**
 * @brief Labelled segments covering field_text
 *
 * @param gateway may be null; non-capable providers take the lexicon path
 * @throws lcds::error invalid_argument on empty text; segmentation_rejected
 *         when options.fallback_on_reject is false and the provider output
 *         cannot be aligned
 */
[[nodiscard]] std::vector<semantic_segment> semantic_segment_text(std::string_view field_text,
                                                                  const gateway::completion_gateway* gateway,
                                                                  const segmenter_options& options = {},
                                                                  std::vector<std::string>* warnings = nullptr);

}  // namespace lcds::segmentation
