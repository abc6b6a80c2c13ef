/**
 * @file attribution.hpp
 * @brief Sentence-level links from a generated summary back into the record
 *
 * Attribution file layout (UTF-8, compact):
 *
 *     {"summary_id":str,"entries":[{"gen_sid":str,"sources":[str],
 *                                   "method":"provider"|"lexical","confidence":float}]}
 *
 * Every supporting id is checked against the candidate pool, which is drawn
 * from the record, so an attribution map never names a sentence the record
 * does not contain.
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/ingest/record.hpp"
#include "lcds/summary/discharge_summary.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace lcds::attribution {

/// Numbers generated sentences `<summary_id>#<ds_field>#<n>`. Idempotent.
[[nodiscard]] summary::discharge_summary assign_ids(summary::discharge_summary summary);

struct candidate {
    std::string sid;
    std::string text;
};

enum class attribution_method { provider, lexical };
enum class attribution_scope { resolved, full };

[[nodiscard]] std::string_view to_string(attribution_method method) noexcept;
[[nodiscard]] std::string_view to_string(attribution_scope scope) noexcept;
/// @throws lcds::error invalid_argument
[[nodiscard]] attribution_scope parse_scope(std::string_view name);
/// @throws lcds::error invalid_argument
[[nodiscard]] attribution_method parse_method(std::string_view name);

inline constexpr double default_attribution_threshold = 0.5;

/**
 * @brief Candidates whose normalized BM25 similarity to the sentence exceeds threshold
 *
 * Best first; ties by id.
 */
[[nodiscard]] std::vector<std::pair<std::string, double>> attribute_lexical(
    std::string_view gen_sentence, const std::vector<candidate>& candidates,
    double threshold = default_attribution_threshold);

struct sentence_attribution {
    std::vector<std::string> sources;
    attribution_method method = attribution_method::provider;
    double confidence = 0.0;
    /// Provider ids discarded because they were not candidates.
    std::size_t dropped_ids = 0;
    std::vector<std::string> diagnostics;
};

/**
 * @brief Asks the provider which candidates support the sentence
 *
 * Returned ids outside the candidate pool are discarded and counted. When
 * the provider reply cannot be parsed, or the provider fails, the lexical
 * attributor answers instead. Confidence is the best lexical similarity
 * among the kept ids.
 */
[[nodiscard]] sentence_attribution attribute_sentence(std::string_view gen_sentence,
                                                      const std::vector<candidate>& candidates,
                                                      const gateway::completion_gateway& gateway,
                                                      double threshold = default_attribution_threshold);

/// Prompt sent by attribute_sentence.
[[nodiscard]] std::string attribution_prompt(std::string_view gen_sentence, const std::vector<candidate>& candidates);

struct attribution_entry {
    std::string gen_sid;
    std::vector<std::string> sources;
    attribution_method method = attribution_method::lexical;
    double confidence = 0.0;

    friend bool operator==(const attribution_entry&, const attribution_entry&) = default;
};

struct attribution_map {
    std::string summary_id;
    std::vector<attribution_entry> entries;
    /// Not serialized: provider ids rejected while building.
    std::size_t dropped_ids = 0;

    [[nodiscard]] const attribution_entry* find(std::string_view gen_sid) const;
};

struct attribution_options {
    attribution_scope scope = attribution_scope::resolved;
    /// Lexical mode ignores the gateway entirely.
    attribution_method mode = attribution_method::provider;
    double threshold = default_attribution_threshold;
};

/// Sentences a summary field may cite under the given scope, in record order.
[[nodiscard]] std::vector<candidate> candidate_pool(const summary::summary_field& field,
                                                    const ingest::unified_record& record, attribution_scope scope);

/**
 * @brief Attributes every generated sentence and writes sources back
 *
 * Knowledge sentences are left unsupported (lexical, confidence 0). The
 * gateway may be null, which forces lexical mode.
 */
[[nodiscard]] attribution_map build_attribution_map(summary::discharge_summary& summary,
                                                    const ingest::unified_record& record,
                                                    const gateway::completion_gateway* gateway,
                                                    const attribution_options& options = {});

/// Ids in the map that do not dereference into the record.
[[nodiscard]] std::vector<std::string> dangling_ids(const attribution_map& map, const ingest::unified_record& record);

[[nodiscard]] nlohmann::ordered_json to_json(const attribution_map& map);
[[nodiscard]] attribution_map attribution_from_json(const nlohmann::json& j);
[[nodiscard]] std::string serialize(const attribution_map& map);
[[nodiscard]] attribution_map parse_attribution(std::string_view text);

}  // namespace lcds::attribution
