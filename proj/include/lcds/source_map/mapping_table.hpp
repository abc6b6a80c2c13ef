/**
 * @file mapping_table.hpp
 * @brief Summary fields, source references and the per-department mapping table
 */

#pragma once

#include "lcds/ingest/record.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::source_map {

// ─────────────────────────────────────────────────────
// Summary fields
// ─────────────────────────────────────────────────────

enum class ds_field {
    patient_info,
    discharge_diagnosis,
    tests_examinations,
    course_treatment,
    discharge_condition,
    medication_advice,
};

/// Generation order.
inline constexpr std::array<ds_field, 6> all_ds_fields{
    ds_field::patient_info,       ds_field::discharge_diagnosis, ds_field::tests_examinations,
    ds_field::course_treatment,   ds_field::discharge_condition, ds_field::medication_advice,
};

[[nodiscard]] std::string_view to_string(ds_field field) noexcept;
/// Title-case heading, e.g. "Course and Treatment".
[[nodiscard]] std::string_view display_name(ds_field field) noexcept;
/// @throws lcds::error invalid_argument
[[nodiscard]] ds_field parse_ds_field(std::string_view name);
[[nodiscard]] std::optional<ds_field> try_parse_ds_field(std::string_view name) noexcept;

/// Short fields are located by keyword containment, long ones by segmentation and BM25.
[[nodiscard]] bool is_short_field(ds_field field) noexcept;

// ─────────────────────────────────────────────────────
// Sources and priorities
// ─────────────────────────────────────────────────────

struct source_ref {
    ingest::doc_type type = ingest::doc_type::medical_records;
    std::string field_name;

    [[nodiscard]] std::string str() const;

    friend bool operator==(const source_ref&, const source_ref&) = default;
    friend std::strong_ordering operator<=>(const source_ref& a, const source_ref& b);
};

/// covered / total, kept unreduced; ordering compares by cross-multiplication.
struct priority_fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    /// Value equality: 2/6 == 1/3.
    friend bool operator==(const priority_fraction& a, const priority_fraction& b) noexcept {
        return a.num * b.den == b.num * a.den;
    }
    friend std::strong_ordering operator<=>(const priority_fraction& a, const priority_fraction& b) noexcept {
        return a.num * b.den <=> b.num * a.den;
    }
};

struct ranked_source {
    source_ref source;
    priority_fraction priority;
    double mean_similarity = 0.0;

    friend bool operator==(const ranked_source& a, const ranked_source& b) {
        return a.source == b.source && a.priority.num == b.priority.num && a.priority.den == b.priority.den &&
               a.mean_similarity == b.mean_similarity;
    }
};

struct mapping_entry {
    ds_field field = ds_field::patient_info;
    std::optional<std::string> segment_label;
    /// Highest priority first.
    std::vector<ranked_source> sources;

    friend bool operator==(const mapping_entry&, const mapping_entry&) = default;
};

// ─────────────────────────────────────────────────────
// Table
// ─────────────────────────────────────────────────────

inline constexpr int mapping_schema_version = 1;

struct mapping_table {
    std::string department;
    int version = 1;
    std::vector<mapping_entry> entries;

    [[nodiscard]] const mapping_entry* find(ds_field field, const std::optional<std::string>& label) const;
    /// Every entry for a field, in table order.
    [[nodiscard]] std::vector<const mapping_entry*> entries_for(ds_field field) const;

    friend bool operator==(const mapping_table&, const mapping_table&) = default;
};

[[nodiscard]] nlohmann::ordered_json to_json(const mapping_table& table);
/// @throws lcds::error parse_failure
[[nodiscard]] mapping_table table_from_json(const nlohmann::json& j);
[[nodiscard]] std::string serialize(const mapping_table& table);
[[nodiscard]] mapping_table parse_table(std::string_view text);

}  // namespace lcds::source_map
