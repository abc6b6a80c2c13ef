/**
 * @file converter.hpp
 * @brief Document type detection and table-driven conversion to unified form
 *
 * Medical records arrive as HTML, nursing records as XML, and the remaining
 * six types as keyed JSON (an object, or an array of row objects). Section
 * labels are mapped to canonical field names through a per-type table that
 * can be replaced at runtime; unknown labels are kept verbatim.
 */

#pragma once

#include "lcds/ingest/record.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lcds::ingest {

struct raw_document {
    std::string doc_id;
    /// Type supplied with the upload, if any. Takes precedence over sniffing.
    std::optional<doc_type> declared_type;
    std::string payload;
    std::string encoding = "utf-8";
};

/**
 * @brief Section-label → field-name table plus key signatures per type
 */
struct type_map {
    std::map<doc_type, std::map<std::string, std::string>> sections;
    /// Checked in order; a keyed payload matches when every key is present.
    std::vector<std::pair<doc_type, std::vector<std::string>>> signatures;
    /// Field name for text that precedes the first section header.
    std::string default_section = "body";

    [[nodiscard]] static type_map defaults();
    [[nodiscard]] static type_map from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::ordered_json to_json() const;

    /// Canonical name for a label; the sanitized label itself when unmapped.
    [[nodiscard]] std::string canonical_field(doc_type type, std::string_view label) const;
    [[nodiscard]] bool is_known_label(doc_type type, std::string_view label) const;
};

/// @throws lcds::error unrecognized_format
[[nodiscard]] doc_type detect_doc_type(const raw_document& raw, const type_map& map = type_map::defaults());

struct conversion_result {
    unified_document document;
    std::vector<std::string> warnings;
};

/// @throws lcds::error unrecognized_format, conversion_failure
[[nodiscard]] conversion_result convert_document(const raw_document& raw,
                                                 const type_map& map = type_map::defaults());

}  // namespace lcds::ingest
