#include "lcds/evaluation/human_sheet.hpp"

#include "lcds/core/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace lcds::evaluation {

std::string_view to_string(human_dimension dimension) noexcept {
    switch (dimension) {
        case human_dimension::accuracy: return "accuracy";
        case human_dimension::completeness: return "completeness";
        case human_dimension::standardization: return "standardization";
        case human_dimension::utility: return "utility";
    }
    return "accuracy";
}

human_dimension parse_human_dimension(std::string_view name) {
    for (auto d : all_human_dimensions) {
        if (to_string(d) == name) return d;
    }
    throw error(error_code::invalid_argument, "unknown dimension '" + std::string(name) + "'");
}

int dimension_max(human_dimension dimension) noexcept {
    switch (dimension) {
        case human_dimension::accuracy: return 30;
        case human_dimension::completeness: return 30;
        case human_dimension::standardization: return 25;
        case human_dimension::utility: return 15;
    }
    return 0;
}

const std::vector<deduction_rule>& deduction_catalog() {
    using d = human_dimension;
    static const std::vector<deduction_rule> catalog{
        {"patient_identification", d::accuracy, 3, false},
        {"time_points", d::accuracy, 3, false},
        {"diagnostic_contradiction", d::accuracy, 15, false},
        {"diagnostic_omission", d::accuracy, 10, false},
        {"admission_history_error", d::accuracy, 3, false},
        {"treatment_element_missing", d::completeness, 8, false},
        {"key_exam_missing", d::completeness, 5, false},
        {"discharge_instruction_missing", d::completeness, 6, false},
        {"discharge_condition_discrepancy", d::completeness, 5, false},
        {"terminology_error", d::standardization, 3, false},
        {"logical_disorder", d::standardization, 8, false},
        {"redundant_content", d::standardization, 5, false},
        {"vague_advice", d::utility, 5, false},
        {"risk_mitigation_missing", d::utility, 8, false},
        {"individualized_followup", d::utility, 2, true},
    };
    return catalog;
}

const deduction_rule* find_rule(std::string_view rule_id) {
    const auto& catalog = deduction_catalog();
    const auto it = std::find_if(catalog.begin(), catalog.end(),
                                 [&](const deduction_rule& r) { return r.rule_id == rule_id; });
    return it == catalog.end() ? nullptr : &*it;
}

human_score_sheet apply_human_deductions(const std::vector<deduction_item>& items) {
    human_score_sheet sheet;
    sheet.items = items;
    std::array<int, 4> deducted{};
    for (const auto& item : items) {
        const auto* rule = find_rule(item.rule_id);
        if (rule == nullptr) throw error(error_code::unknown_rule_id, "UnknownRuleId: " + item.rule_id);
        if (rule->dimension != item.dimension) {
            throw error(error_code::invalid_deduction,
                        item.rule_id + " belongs to " + std::string(to_string(rule->dimension)));
        }
        const bool ok = rule->adjustable ? std::abs(item.points) <= rule->points : item.points == rule->points;
        if (!ok) {
            throw error(error_code::invalid_deduction,
                        item.rule_id + " does not allow " + std::to_string(item.points) + " points");
        }
        deducted[static_cast<std::size_t>(item.dimension)] += item.points;
    }
    for (std::size_t i = 0; i < all_human_dimensions.size(); ++i) {
        const int max = dimension_max(all_human_dimensions[i]);
        sheet.subtotals[i] = std::clamp(max - deducted[i], 0, max);
        sheet.total += sheet.subtotals[i];
    }
    return sheet;
}

}  // namespace lcds::evaluation
