/**
 * @file structured.hpp
 * @brief Parsers for the three structured reply shapes
 *
 * Each parser returns std::nullopt rather than guessing when the text does
 * not follow its grammar.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcds::gateway {

enum class structured_shape { identifier_list, label_segment_map, judge_breakdown };

[[nodiscard]] std::string_view to_string(structured_shape shape) noexcept;

/// Ordered (label, text) pairs as returned by a segmentation call.
using label_segments = std::vector<std::pair<std::string, std::string>>;

/// Judge reply as written by the model, before range validation.
struct judge_output {
    double score = 0.0;
    double information_accuracy = 0.0;
    double medical_completeness = 0.0;
    double professional_standardization = 0.0;
    double clinical_practicality = 0.0;
};

/**
 * @brief "[a#f#0, b#g#3]" or a JSON array of strings
 *
 * Every element must parse as a sentence identifier; "[]" is a valid empty
 * list.
 */
[[nodiscard]] std::optional<std::vector<std::string>> parse_identifier_list(std::string_view text);

/// JSON object of label → text, keys kept in reply order.
[[nodiscard]] std::optional<label_segments> parse_label_segment_map(std::string_view text);

/**
 * @brief Judge rubric reply
 *
 * Accepts the rubric's own layout, where keys and values may be separated by
 * whitespace instead of ':' and each dimension score may carry its "/max"
 * suffix, as well as plain JSON. Exactly the keys "score" and "breakdown"
 * must be present, and the breakdown must hold exactly the four dimension
 * keys. A "/max" suffix that disagrees with the dimension maximum is
 * rejected. Prose around the outermost braces is ignored.
 */
[[nodiscard]] std::optional<judge_output> parse_judge_output(std::string_view text);

}  // namespace lcds::gateway
