/**
 * @file builder.hpp
 * @brief Statistical construction of a mapping table from reference cases
 *
 * For each reference case the builder finds which record fields supplied
 * each summary field, then turns those observations into per-source
 * priority fractions: the share of cases in which the source appeared.
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/retrieval/bm25.hpp"
#include "lcds/segmentation/semantic_segmenter.hpp"
#include "lcds/source_map/mapping_table.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcds::source_map {

/// Keywords taken from a short-field reference: its clauses, each at least two characters.
[[nodiscard]] std::vector<std::string> reference_keywords(std::string_view ground_truth);

/**
 * @brief Fields whose content contains a keyword of the ground truth
 *
 * Matching ignores whitespace. Each (doc_type, field_name) is reported
 * once, in record order.
 */
[[nodiscard]] std::vector<source_ref> locate_short_field(const ingest::unified_record& record,
                                                         std::string_view ground_truth);

struct long_field_hit {
    std::string segment_label;
    source_ref source;
    double score = 0.0;
};

struct locate_options {
    double threshold = 0.8;
    retrieval::bm25_params bm25;
    segmentation::segmenter_options segmenter;
};

/**
 * @brief Segments a long reference text and ranks record fields per segment
 *
 * Every record field is a candidate, keyed `<doc_id>#<field_name>`.
 * @throws lcds::error segmentation_rejected (when fallback is disabled)
 */
[[nodiscard]] std::vector<long_field_hit> locate_long_field(const ingest::unified_record& record,
                                                            std::string_view ds_text,
                                                            const gateway::completion_gateway* gateway,
                                                            const locate_options& options = {},
                                                            std::vector<std::string>* warnings = nullptr);

struct observation {
    std::string record_id;
    std::optional<std::string> segment_label;
    source_ref source;
    double similarity = 1.0;
};

/**
 * @brief Priority fractions for one table entry
 *
 * A source's priority is the number of distinct records that observed it
 * over the number of distinct records among all observations. A source seen
 * several times in one record counts once, at its best similarity.
 * Order: priority, then mean similarity (both descending), then source.
 *
 * @throws lcds::error empty_observations
 */
[[nodiscard]] std::vector<ranked_source> compute_priorities(const std::vector<observation>& observations);

struct reference_case {
    std::string case_id;
    ingest::unified_record record;
    /// Reference summary text per field; missing or empty fields are skipped.
    std::map<ds_field, std::string> reference;
};

struct build_result {
    mapping_table table;
    std::vector<std::string> warnings;
};

/**
 * @brief Reads a corpus directory
 *
 * Each subdirectory is one case holding `record.json` (unified record) and
 * `reference.json` (an object from ds_field name to reference text). Cases
 * are returned in directory-name order; the directory name is the case id.
 *
 * @throws lcds::error io_failure, parse_failure
 */
[[nodiscard]] std::vector<reference_case> load_corpus(const std::filesystem::path& dir);

/// @throws lcds::error parse_failure on an unknown field name
[[nodiscard]] std::map<ds_field, std::string> reference_from_json(const nlohmann::json& j);

/// @throws lcds::error empty_corpus
[[nodiscard]] build_result build_mapping_table(const std::vector<reference_case>& corpus,
                                               const std::string& department,
                                               const gateway::completion_gateway* gateway,
                                               const locate_options& options = {}, int version = 1);

}  // namespace lcds::source_map
