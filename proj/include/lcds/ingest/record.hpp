/**
 * @file record.hpp
 * @brief Unified EMR record model, sentence identifiers and JSON mapping
 *
 * A unified record holds one admission's documents after conversion. Every
 * sentence carries an identifier of the form `<doc_id>#<field_name>#<n>`
 * that stays stable across serialization, so mapping tables, prompts and
 * attribution maps can all point back into the record.
 */

#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcds::ingest {

// ─────────────────────────────────────────────────────
// Document taxonomy
// ─────────────────────────────────────────────────────

enum class doc_type {
    medical_records,
    nursing_records,
    examination,
    laboratory_test,
    medical_orders,
    pathology_report,
    diagnosis,
    vital_signs,
};

inline constexpr std::array<doc_type, 8> all_doc_types{
    doc_type::medical_records, doc_type::nursing_records,  doc_type::examination,
    doc_type::laboratory_test, doc_type::medical_orders,   doc_type::pathology_report,
    doc_type::diagnosis,       doc_type::vital_signs,
};

[[nodiscard]] std::string_view to_string(doc_type type) noexcept;

/// Throws lcds::error(invalid_argument) on an unknown name.
[[nodiscard]] doc_type parse_doc_type(std::string_view name);
[[nodiscard]] std::optional<doc_type> try_parse_doc_type(std::string_view name) noexcept;

// ─────────────────────────────────────────────────────
// Sentence identifiers
// ─────────────────────────────────────────────────────

/**
 * @brief `<owner>#<field>#<n>` identifier
 *
 * The owner is a doc_id for record sentences and a summary_id for generated
 * ones. Parsing splits on the last two '#', so owners may contain '#' but
 * field names may not.
 */
struct sentence_id {
    std::string owner;
    std::string field;
    std::size_t index = 0;

    [[nodiscard]] std::string str() const;
    [[nodiscard]] static std::optional<sentence_id> parse(std::string_view s);

    friend bool operator==(const sentence_id&, const sentence_id&) = default;
};

// ─────────────────────────────────────────────────────
// Record model
// ─────────────────────────────────────────────────────

struct sentence {
    std::string sid;
    std::string text;

    friend bool operator==(const sentence&, const sentence&) = default;
};

struct record_field {
    std::string field_name;
    std::string content;
    std::vector<sentence> sentences;

    friend bool operator==(const record_field&, const record_field&) = default;
};

struct unified_document {
    std::string doc_id;
    doc_type type = doc_type::medical_records;
    std::string title;
    std::optional<std::string> timestamp;
    std::vector<record_field> fields;

    [[nodiscard]] const record_field* find_field(std::string_view name) const;

    friend bool operator==(const unified_document&, const unified_document&) = default;
};

struct unified_record {
    std::string patient_id;
    std::string admission_id;
    std::vector<unified_document> documents;

    [[nodiscard]] const unified_document* find_document(std::string_view doc_id) const;

    /// Looks up a sentence by its identifier; nullptr when absent.
    [[nodiscard]] const sentence* find_sentence(std::string_view sid) const;

    friend bool operator==(const unified_record&, const unified_record&) = default;
};

/// Key used for a field across the pipeline: `<doc_id>#<field_name>`.
[[nodiscard]] std::string field_key(const unified_document& doc, const record_field& field);

/**
 * @brief Builds a field from raw content
 *
 * Content is whitespace-collapsed; sentences are split and numbered from 0.
 */
[[nodiscard]] record_field make_field(std::string_view doc_id, std::string field_name,
                                      std::string_view raw_content);

// ─────────────────────────────────────────────────────
// Assembly and validation
// ─────────────────────────────────────────────────────

/**
 * @brief Merges converted documents into one record
 *
 * Documents are ordered by ascending timestamp; documents without a
 * timestamp follow, and ties are broken by doc_id.
 *
 * @throws lcds::error duplicate_doc_id, or invalid_argument on an empty list
 */
[[nodiscard]] unified_record build_record(std::vector<unified_document> docs,
                                          std::string patient_id, std::string admission_id);

enum class violation_kind {
    duplicate_doc_id,
    duplicate_sentence_id,
    empty_field_name,
    content_mismatch,
    malformed_sentence_id,
};

[[nodiscard]] std::string_view to_string(violation_kind kind) noexcept;

struct violation {
    violation_kind kind;
    std::string detail;
};

/// Every invariant violation in the record; empty iff the record is valid.
[[nodiscard]] std::vector<violation> validate_record(const unified_record& record);

// ─────────────────────────────────────────────────────
// Serialization (schema_version 1)
// ─────────────────────────────────────────────────────

inline constexpr int record_schema_version = 1;

[[nodiscard]] nlohmann::ordered_json to_json(const unified_record& record);
[[nodiscard]] unified_record record_from_json(const nlohmann::json& j);

/// Compact UTF-8 serialization; byte-stable for equal records.
[[nodiscard]] std::string serialize(const unified_record& record);
[[nodiscard]] unified_record parse_record(std::string_view text);

}  // namespace lcds::ingest
