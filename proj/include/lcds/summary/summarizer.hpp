/**
 * @file summarizer.hpp
 * @brief Field-by-field generation of the silver discharge summary
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/logic/engine.hpp"
#include "lcds/source_map/mapping_table.hpp"
#include "lcds/summary/discharge_summary.hpp"

#include <map>

namespace lcds::summary {

enum class knowledge_merge {
    /// Recommendations not already in the model text follow it as extra sentences.
    append,
    /// Model text only; recommendations reach the model through the prompt.
    model_only,
};

struct generation_options {
    /// Resolve every present source instead of stopping at the first.
    bool multi_source = false;
    /// When false every record field is given to the model as source content.
    bool use_source_map = true;
    knowledge_merge knowledge = knowledge_merge::append;
    /// Per-field physician edits.
    std::map<source_map::ds_field, logic::rule_edits> edits;
    int max_tokens = 1024;
    /// Generate the six fields concurrently; the result is identical either way.
    bool parallel = true;
};

/**
 * @brief Generates one field
 *
 * Failures are captured in the returned field's error member rather than
 * thrown. A non-knowledge field without sources gets empty text and the
 * source_unavailable flag; the model is not called.
 */
[[nodiscard]] summary_field generate_field(const ingest::unified_record& record,
                                           const source_map::mapping_table& table,
                                           const logic::department_config& department, source_map::ds_field field,
                                           const gateway::completion_gateway& gateway,
                                           const generation_options& options = {});

/// `<patient_id>-<admission_id>`.
[[nodiscard]] std::string summary_id_for(const ingest::unified_record& record);

/**
 * @brief Generates all six fields and numbers the sentences
 *
 * @throws lcds::error generation_failed when every field failed
 */
[[nodiscard]] discharge_summary generate_summary(const ingest::unified_record& record,
                                                 const source_map::mapping_table& table,
                                                 const logic::department_config& department,
                                                 const gateway::completion_gateway& gateway,
                                                 const generation_options& options = {});

}  // namespace lcds::summary
