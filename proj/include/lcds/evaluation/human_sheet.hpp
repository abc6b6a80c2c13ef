/**
 * @file human_sheet.hpp
 * @brief Reviewer score sheet: catalogued deductions, clamped subtotals
 *
 * Reviewers record deductions by rule id; the sheet checks each against the
 * catalogue and computes the totals. Dimension maxima are 30, 30, 25 and 15.
 */

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::evaluation {

enum class human_dimension { accuracy, completeness, standardization, utility };

inline constexpr std::array<human_dimension, 4> all_human_dimensions{
    human_dimension::accuracy, human_dimension::completeness, human_dimension::standardization,
    human_dimension::utility,
};

[[nodiscard]] std::string_view to_string(human_dimension dimension) noexcept;
/// @throws lcds::error invalid_argument
[[nodiscard]] human_dimension parse_human_dimension(std::string_view name);
[[nodiscard]] int dimension_max(human_dimension dimension) noexcept;

struct deduction_rule {
    std::string_view rule_id;
    human_dimension dimension;
    /// Points removed per occurrence.
    int points;
    /// Adjustment rules accept any value in [-points, points]; negative values add points.
    bool adjustable;
};

[[nodiscard]] const std::vector<deduction_rule>& deduction_catalog();
[[nodiscard]] const deduction_rule* find_rule(std::string_view rule_id);

struct deduction_item {
    human_dimension dimension = human_dimension::accuracy;
    std::string rule_id;
    int points = 0;
};

struct human_score_sheet {
    std::vector<deduction_item> items;
    /// Indexed like all_human_dimensions; each in [0, max].
    std::array<int, 4> subtotals{};
    int total = 0;
};

/**
 * @throws lcds::error unknown_rule_id; invalid_deduction when the points or
 *         dimension disagree with the catalogue
 */
[[nodiscard]] human_score_sheet apply_human_deductions(const std::vector<deduction_item>& items);

}  // namespace lcds::evaluation
