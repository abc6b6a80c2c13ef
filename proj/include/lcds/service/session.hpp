/**
 * @file session.hpp
 * @brief Review session state and the golden record
 */

#pragma once

#include "lcds/attribution/attribution.hpp"
#include "lcds/ingest/converter.hpp"
#include "lcds/logic/engine.hpp"
#include "lcds/summary/discharge_summary.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcds::service {

/// Sessions only move forward through these states.
enum class session_state { created, uploaded, converted, configured, generated, reviewed, exported };

[[nodiscard]] std::string_view to_string(session_state state) noexcept;
[[nodiscard]] session_state parse_session_state(std::string_view name);

struct comment {
    std::string gen_sid;
    std::string author;
    std::string text;
    std::string timestamp;
};

struct edit_record {
    std::string gen_sid;
    std::string old_text;
    std::string new_text;
    std::string author;
    std::string timestamp;
};

struct session_config {
    std::string department;
    std::string provider = "mock";
    bool multi_source = false;
    std::map<source_map::ds_field, logic::rule_edits> rule_edits;
};

struct session {
    std::string session_id;
    session_state state = session_state::created;
    std::string patient_id;
    std::string admission_id;
    std::vector<ingest::raw_document> documents;
    std::vector<std::string> conversion_warnings;
    std::optional<ingest::unified_record> record;
    std::optional<session_config> config;
    std::optional<summary::discharge_summary> silver;
    std::optional<summary::discharge_summary> summary;
    std::optional<attribution::attribution_map> attribution;
    std::vector<comment> comments;
    std::vector<edit_record> edits;
    std::optional<nlohmann::ordered_json> golden_record;
    std::string created_at;
    std::string updated_at;
};

[[nodiscard]] nlohmann::ordered_json to_json(const session_config& config);
/// @throws lcds::error parse_failure
[[nodiscard]] session_config config_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::ordered_json to_json(const session& s);
/// @throws lcds::error parse_failure
[[nodiscard]] session session_from_json(const nlohmann::json& j);

/**
 * @brief The exported record for a session
 *
 * Layout: {"schema_version":1,"session_id","patient_id","admission_id",
 * "department","reviewer_id","silver","golden","attribution","comments",
 * "edits","created_at","exported_at"}. "golden" is the reviewed summary
 * with status golden.
 */
[[nodiscard]] nlohmann::ordered_json make_golden_record(const session& s, const std::string& reviewer_id,
                                                        const std::string& exported_at);

}  // namespace lcds::service
