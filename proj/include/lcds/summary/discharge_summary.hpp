/**
 * @file discharge_summary.hpp
 * @brief Discharge summary model and its JSON file format
 *
 * File layout (UTF-8, compact, keys in this order):
 *
 *     {"schema_version":1,"summary_id","department","status":"silver"|"golden",
 *      "fields":[{"ds_field","text","plan_id","source_unavailable","error",
 *                 "diagnostics":[str],"source_fields":[str],
 *                 "sentences":[{"sid","text","kind","sources":[str]}]}]}
 *
 * "error" is null unless generation of that field failed. "source_fields"
 * lists the `<doc_id>#<field_name>` keys the field was generated from.
 */

#pragma once

#include "lcds/source_map/mapping_table.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::summary {

enum class summary_status { silver, golden };
enum class sentence_kind { generated, knowledge };

[[nodiscard]] std::string_view to_string(summary_status status) noexcept;
[[nodiscard]] std::string_view to_string(sentence_kind kind) noexcept;

struct summary_sentence {
    std::string sid;
    std::string text;
    sentence_kind kind = sentence_kind::generated;
    /// Supporting record sentence ids; filled by attribution.
    std::vector<std::string> sources;

    friend bool operator==(const summary_sentence&, const summary_sentence&) = default;
};

struct summary_field {
    source_map::ds_field field = source_map::ds_field::patient_info;
    std::string text;
    std::string plan_id;
    bool source_unavailable = false;
    std::optional<std::string> error;
    std::vector<std::string> diagnostics;
    std::vector<std::string> source_fields;
    std::vector<summary_sentence> sentences;

    friend bool operator==(const summary_field&, const summary_field&) = default;
};

inline constexpr int summary_schema_version = 1;

struct discharge_summary {
    std::string summary_id;
    std::string department;
    summary_status status = summary_status::silver;
    std::vector<summary_field> fields;

    [[nodiscard]] summary_field* find(source_map::ds_field field);
    [[nodiscard]] const summary_field* find(source_map::ds_field field) const;
    /// The sentence with this id, or nullptr.
    [[nodiscard]] summary_sentence* find_sentence(std::string_view sid);
    [[nodiscard]] const summary_sentence* find_sentence(std::string_view sid) const;

    friend bool operator==(const discharge_summary&, const discharge_summary&) = default;
};

/// Rebuilds a field's text from its sentences.
void refresh_text(summary_field& field);

/// Every invariant the summary breaks; empty iff valid.
[[nodiscard]] std::vector<std::string> validate_summary(const discharge_summary& summary);

[[nodiscard]] nlohmann::ordered_json to_json(const discharge_summary& summary);
/// @throws lcds::error parse_failure
[[nodiscard]] discharge_summary summary_from_json(const nlohmann::json& j);
[[nodiscard]] std::string serialize(const discharge_summary& summary);
[[nodiscard]] discharge_summary parse_summary(std::string_view text);

}  // namespace lcds::summary
