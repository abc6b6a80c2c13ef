/**
 * @file engine.hpp
 * @brief Task parsing, rule matching and prompt orchestration for one field
 *
 * Stage 1 reads the field's rules and decides which logic structures the
 * field needs. Stage 2 binds rules (including physician edits) to those
 * structures. Stage 3 renders the composite prompt from the plan, the
 * resolved source fields and any knowledge-base hits.
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/logic/rulebook.hpp"
#include "lcds/source_map/resolver.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lcds::logic {

inline constexpr std::size_t max_structures = 4;

struct plan_structure {
    logic_type type = logic_type::extraction;
    std::vector<generation_rule> rules;
};

struct logic_plan {
    std::string plan_id;
    std::string department;
    source_map::ds_field field = source_map::ds_field::patient_info;
    std::vector<plan_structure> structures;
    std::optional<std::string> rendered_prompt;
    std::vector<std::string> warnings;

    [[nodiscard]] bool has(logic_type type) const;
};

// ─────────────────────────────────────────────────────
// Stage 1
// ─────────────────────────────────────────────────────

/// Types whose cue words occur in text, ordered by first occurrence.
[[nodiscard]] std::vector<logic_type> classify_logic_types(std::string_view rule_text);

struct task_parse {
    std::vector<logic_type> types;
    std::vector<std::string> warnings;
};

/**
 * @brief Logic types a rule calls for
 *
 * A semantic-capable gateway is asked first; an empty or unusable answer
 * falls through to the cue-word classifier. More than four types are cut to
 * the first four with a warning.
 *
 * @throws lcds::error unparseable_rule when no type is found
 */
[[nodiscard]] task_parse parse_task(const generation_rule& rule, const gateway::completion_gateway* gateway);

// ─────────────────────────────────────────────────────
// Stage 2
// ─────────────────────────────────────────────────────

/// Physician changes to a field's rules.
struct rule_edits {
    /// rule_id -> replacement text; only editable rules may be replaced.
    std::map<std::string, std::string> replace;
    /// Extra rules bound to the structure of the given type.
    std::vector<std::pair<logic_type, std::string>> append;

    [[nodiscard]] bool empty() const noexcept { return replace.empty() && append.empty(); }
};

/**
 * @brief A field's rules after physician edits
 *
 * @throws lcds::error invalid_argument for an unknown or non-editable rule id
 *         or blank replacement text
 */
[[nodiscard]] std::vector<generation_rule> apply_edits(const rulebook& book, source_map::ds_field field,
                                                       const rule_edits& edits);

/**
 * @brief Binds rules to structures
 *
 * A rule joins a structure when the structure's type is its declared type
 * or one of its parsed types. Appended rules join by declared type only.
 *
 * @throws lcds::error no_rule_for_type when a structure receives no rule
 */
[[nodiscard]] logic_plan match_rules(const std::vector<logic_type>& structures,
                                     const std::vector<generation_rule>& field_rules,
                                     source_map::ds_field field, const std::string& department,
                                     const gateway::completion_gateway* gateway = nullptr);

/// Stages 1 and 2 over the department rulebook for one field.
[[nodiscard]] logic_plan plan_field(const rulebook& book, source_map::ds_field field,
                                    const gateway::completion_gateway* gateway = nullptr,
                                    const rule_edits& edits = {});

// ─────────────────────────────────────────────────────
// Stage 3
// ─────────────────────────────────────────────────────

/**
 * @brief Renders the composite prompt
 *
 * Sections, in order: Role, one "Logic N: <Type>" block per structure,
 * Source Content with identified sentences, Knowledge Base, Output Format.
 *
 * @throws lcds::error empty_sources when the plan has no knowledge structure
 *         and no source sentence is given
 */
[[nodiscard]] std::string orchestrate(const logic_plan& plan,
                                      const std::vector<source_map::resolved_source>& sources,
                                      const std::vector<std::string>& knowledge_hits);

/// Recommendations whose patterns match the record, in knowledge-base order.
[[nodiscard]] std::vector<std::string> apply_knowledge(const ingest::unified_record& record,
                                                       const knowledge_base& kb);

}  // namespace lcds::logic
