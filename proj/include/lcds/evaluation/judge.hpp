/**
 * @file judge.hpp
 * @brief Model-as-judge rubric scoring
 *
 * The rubric prompt is a template with "{reference}" and "{generated}"
 * placeholders. The model must answer in the rubric's output layout, which
 * gateway::parse_judge_output understands.
 */

#pragma once

#include "lcds/gateway/completion.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace lcds::evaluation {

inline constexpr double judge_max_accuracy = 40.0;
inline constexpr double judge_max_completeness = 35.0;
inline constexpr double judge_max_standardization = 15.0;
inline constexpr double judge_max_practicality = 10.0;
inline constexpr double judge_max_total = 100.0;

struct judge_breakdown {
    double total = 0.0;
    double information_accuracy = 0.0;
    double medical_completeness = 0.0;
    double professional_standardization = 0.0;
    double clinical_practicality = 0.0;
    /// The model's total disagreed with its breakdown and was recomputed.
    bool total_corrected = false;
    double reported_total = 0.0;

    [[nodiscard]] double breakdown_sum() const noexcept {
        return information_accuracy + medical_completeness + professional_standardization + clinical_practicality;
    }
};

/// Built-in rubric; identical to config/prompts/judge_rubric.txt.
[[nodiscard]] std::string default_judge_template();
[[nodiscard]] std::string load_judge_template(const std::filesystem::path& path);

/// @throws lcds::error invalid_argument when a placeholder is missing
[[nodiscard]] std::string render_judge_prompt(std::string_view judge_template, std::string_view generated,
                                              std::string_view reference);

/**
 * @brief Range checks and total reconciliation
 *
 * @throws lcds::error judge_range_violation when a dimension lies outside
 *         [0, max] or the reported total outside [0, 100]
 */
[[nodiscard]] judge_breakdown validate_judge(const gateway::judge_output& raw);

/// @throws lcds::error malformed_structured_output, judge_range_violation, gateway errors
[[nodiscard]] judge_breakdown judge_score(std::string_view generated, std::string_view reference,
                                          const gateway::completion_gateway& gateway,
                                          std::string_view judge_template = {});

}  // namespace lcds::evaluation
