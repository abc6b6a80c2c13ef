/**
 * @file rulebook.hpp
 * @brief Logic types, per-department generation rules and knowledge bases
 */

#pragma once

#include "lcds/source_map/mapping_table.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::logic {

enum class logic_type {
    extraction,
    summarization,
    judgment,
    inference,
    knowledge,
};

inline constexpr std::array<logic_type, 5> all_logic_types{
    logic_type::extraction, logic_type::summarization, logic_type::judgment,
    logic_type::inference,  logic_type::knowledge,
};

[[nodiscard]] std::string_view to_string(logic_type type) noexcept;
/// Capitalized name used in prompt headings.
[[nodiscard]] std::string_view display_name(logic_type type) noexcept;
/// Accepts "reasoning" as an alias of inference; case-insensitive.
[[nodiscard]] std::optional<logic_type> try_parse_logic_type(std::string_view name) noexcept;
/// @throws lcds::error invalid_argument
[[nodiscard]] logic_type parse_logic_type(std::string_view name);

struct generation_rule {
    std::string rule_id;
    source_map::ds_field field = source_map::ds_field::patient_info;
    std::string department;
    /// Type declared in the rulebook; task parsing may find more.
    logic_type declared_type = logic_type::extraction;
    std::string text;
    bool editable = true;
    /// Added by a physician against a specific structure; bound by declared_type only.
    bool appended = false;

    friend bool operator==(const generation_rule&, const generation_rule&) = default;
};

struct rulebook {
    std::string department;
    std::vector<generation_rule> rules;

    /// Rules for one summary field, in file order.
    [[nodiscard]] std::vector<generation_rule> for_field(source_map::ds_field field) const;
};

/// @throws lcds::error parse_failure (malformed, empty text, duplicate rule id per field)
[[nodiscard]] rulebook rulebook_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::ordered_json to_json(const rulebook& book);
[[nodiscard]] rulebook load_rulebook(const std::filesystem::path& path);

struct knowledge_entry {
    std::string department;
    /// Record field to inspect; "*" inspects every field.
    std::string field_name;
    /// Text the field must contain, compared ignoring whitespace.
    std::string contains;
    std::string recommendation;

    friend bool operator==(const knowledge_entry&, const knowledge_entry&) = default;
};

struct knowledge_base {
    std::string department;
    std::vector<knowledge_entry> entries;
};

[[nodiscard]] knowledge_base knowledge_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::ordered_json to_json(const knowledge_base& kb);
[[nodiscard]] knowledge_base load_knowledge_base(const std::filesystem::path& path);

/// rules.json and knowledge.json of one department directory.
struct department_config {
    rulebook rules;
    knowledge_base knowledge;
};

/// A missing knowledge.json yields an empty knowledge base.
[[nodiscard]] department_config load_department(const std::filesystem::path& dir);

}  // namespace lcds::logic
