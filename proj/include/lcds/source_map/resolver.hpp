/**
 * @file resolver.hpp
 * @brief Priority-ordered source lookup at generation time
 */

#pragma once

#include "lcds/source_map/mapping_table.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcds::source_map {

struct resolved_source {
    source_ref source;
    std::string doc_id;
    ingest::record_field field;
};

struct resolution {
    std::vector<resolved_source> sources;
    /// Set when no listed source is present in the record.
    bool source_unavailable = false;
};

/**
 * @brief Walks an entry's sources in priority order
 *
 * A source is present when some document of its type has the field with
 * non-blank content. The first present source is returned (every matching
 * document, in record order); with multi_source, all present sources are.
 *
 * @throws lcds::error no_entry when the table has no entry for the key
 */
[[nodiscard]] resolution resolve_sources(const mapping_table& table, const ingest::unified_record& record,
                                         ds_field field, const std::optional<std::string>& segment_label,
                                         bool multi_source = false);

/**
 * @brief Resolves every entry of a field and merges the results
 *
 * Duplicate fields are dropped and the union is returned in record order.
 * The result is unavailable only when every entry is.
 *
 * @throws lcds::error no_entry when the field has no entry at all
 */
[[nodiscard]] resolution resolve_field(const mapping_table& table, const ingest::unified_record& record,
                                       ds_field field, bool multi_source = false);

}  // namespace lcds::source_map
