#include "lcds/ingest/record.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/text.hpp"
#include "lcds/segmentation/sentence_splitter.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace lcds::ingest {

std::string_view to_string(doc_type type) noexcept {
    switch (type) {
        case doc_type::medical_records: return "medical_records";
        case doc_type::nursing_records: return "nursing_records";
        case doc_type::examination: return "examination";
        case doc_type::laboratory_test: return "laboratory_test";
        case doc_type::medical_orders: return "medical_orders";
        case doc_type::pathology_report: return "pathology_report";
        case doc_type::diagnosis: return "diagnosis";
        case doc_type::vital_signs: return "vital_signs";
    }
    return "medical_records";
}

std::optional<doc_type> try_parse_doc_type(std::string_view name) noexcept {
    for (auto t : all_doc_types) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

doc_type parse_doc_type(std::string_view name) {
    if (auto t = try_parse_doc_type(name)) return *t;
    throw error(error_code::invalid_argument, "unknown doc_type '" + std::string(name) + "'");
}

// =============================================================================
// sentence_id
// =============================================================================

std::string sentence_id::str() const {
    return owner + "#" + field + "#" + std::to_string(index);
}

std::optional<sentence_id> sentence_id::parse(std::string_view s) {
    const auto last = s.rfind('#');
    if (last == std::string_view::npos || last == 0) return std::nullopt;
    const auto mid = s.rfind('#', last - 1);
    if (mid == std::string_view::npos || mid == 0 || mid + 1 == last) return std::nullopt;

    const auto digits = s.substr(last + 1);
    if (digits.empty() || (digits.size() > 1 && digits.front() == '0')) return std::nullopt;
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;

    return sentence_id{std::string(s.substr(0, mid)), std::string(s.substr(mid + 1, last - mid - 1)), n};
}

// =============================================================================
// Lookups
// =============================================================================

const record_field* unified_document::find_field(std::string_view name) const {
    for (const auto& f : fields) {
        if (f.field_name == name) return &f;
    }
    return nullptr;
}

const unified_document* unified_record::find_document(std::string_view doc_id) const {
    for (const auto& d : documents) {
        if (d.doc_id == doc_id) return &d;
    }
    return nullptr;
}

const sentence* unified_record::find_sentence(std::string_view sid) const {
    const auto id = sentence_id::parse(sid);
    if (!id) return nullptr;
    const auto* doc = find_document(id->owner);
    if (doc == nullptr) return nullptr;
    const auto* field = doc->find_field(id->field);
    if (field == nullptr) return nullptr;
    for (const auto& s : field->sentences) {
        if (s.sid == sid) return &s;
    }
    return nullptr;
}

std::string field_key(const unified_document& doc, const record_field& field) {
    return doc.doc_id + "#" + field.field_name;
}

record_field make_field(std::string_view doc_id, std::string field_name, std::string_view raw_content) {
    record_field field;
    field.field_name = std::move(field_name);
    field.content = text::collapse_whitespace(raw_content);
    std::size_t n = 0;
    for (auto& s : segmentation::split_sentences(field.content)) {
        field.sentences.push_back(
            {sentence_id{std::string(doc_id), field.field_name, n++}.str(), std::move(s)});
    }
    return field;
}

// =============================================================================
// build_record / validate_record
// =============================================================================

unified_record build_record(std::vector<unified_document> docs, std::string patient_id,
                            std::string admission_id) {
    if (docs.empty()) {
        throw error(error_code::invalid_argument, "build_record needs at least one document");
    }
    std::set<std::string> seen;
    for (const auto& d : docs) {
        if (!seen.insert(d.doc_id).second) {
            throw error(error_code::duplicate_doc_id, "duplicate doc_id '" + d.doc_id + "'");
        }
    }
    std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
        if (a.timestamp.has_value() != b.timestamp.has_value()) return a.timestamp.has_value();
        if (a.timestamp && *a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
        return a.doc_id < b.doc_id;
    });
    return unified_record{std::move(patient_id), std::move(admission_id), std::move(docs)};
}

std::string_view to_string(violation_kind kind) noexcept {
    switch (kind) {
        case violation_kind::duplicate_doc_id: return "DuplicateDocId";
        case violation_kind::duplicate_sentence_id: return "DuplicateSentenceId";
        case violation_kind::empty_field_name: return "EmptyFieldName";
        case violation_kind::content_mismatch: return "ContentMismatch";
        case violation_kind::malformed_sentence_id: return "MalformedSentenceId";
    }
    return "Unknown";
}

std::vector<violation> validate_record(const unified_record& record) {
    std::vector<violation> out;
    std::set<std::string> doc_ids;
    std::set<std::string> sids;

    for (const auto& doc : record.documents) {
        if (!doc_ids.insert(doc.doc_id).second) {
            out.push_back({violation_kind::duplicate_doc_id, doc.doc_id});
        }
        for (const auto& field : doc.fields) {
            if (field.field_name.empty()) {
                out.push_back({violation_kind::empty_field_name, doc.doc_id});
            }
            std::string joined;
            std::optional<std::size_t> previous;
            for (const auto& s : field.sentences) {
                joined += s.text;
                if (!sids.insert(s.sid).second) {
                    out.push_back({violation_kind::duplicate_sentence_id, s.sid});
                }
                const auto id = sentence_id::parse(s.sid);
                if (!id || id->owner != doc.doc_id || id->field != field.field_name ||
                    (previous && id->index <= *previous)) {
                    out.push_back({violation_kind::malformed_sentence_id, s.sid});
                }
                if (id) previous = id->index;
            }
            if (!text::equal_ignoring_whitespace(joined, field.content)) {
                out.push_back({violation_kind::content_mismatch, field_key(doc, field)});
            }
        }
    }
    return out;
}

// =============================================================================
// JSON
// =============================================================================

nlohmann::ordered_json to_json(const unified_record& record) {
    nlohmann::ordered_json j;
    j["schema_version"] = record_schema_version;
    j["patient_id"] = record.patient_id;
    j["admission_id"] = record.admission_id;
    auto docs = nlohmann::ordered_json::array();
    for (const auto& d : record.documents) {
        nlohmann::ordered_json dj;
        dj["doc_id"] = d.doc_id;
        dj["doc_type"] = std::string(to_string(d.type));
        dj["title"] = d.title;
        dj["timestamp"] = d.timestamp ? nlohmann::ordered_json(*d.timestamp) : nlohmann::ordered_json(nullptr);
        auto fields = nlohmann::ordered_json::array();
        for (const auto& f : d.fields) {
            nlohmann::ordered_json fj;
            fj["field_name"] = f.field_name;
            fj["content"] = f.content;
            auto sentences = nlohmann::ordered_json::array();
            for (const auto& s : f.sentences) {
                nlohmann::ordered_json sj;
                sj["sid"] = s.sid;
                sj["text"] = s.text;
                sentences.push_back(std::move(sj));
            }
            fj["sentences"] = std::move(sentences);
            fields.push_back(std::move(fj));
        }
        dj["fields"] = std::move(fields);
        docs.push_back(std::move(dj));
    }
    j["documents"] = std::move(docs);
    return j;
}

unified_record record_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != record_schema_version) {
            throw error(error_code::parse_failure, "unsupported record schema_version");
        }
        unified_record record;
        record.patient_id = j.at("patient_id").get<std::string>();
        record.admission_id = j.at("admission_id").get<std::string>();
        for (const auto& dj : j.at("documents")) {
            unified_document d;
            d.doc_id = dj.at("doc_id").get<std::string>();
            d.type = parse_doc_type(dj.at("doc_type").get<std::string>());
            d.title = dj.at("title").get<std::string>();
            if (!dj.at("timestamp").is_null()) d.timestamp = dj.at("timestamp").get<std::string>();
            for (const auto& fj : dj.at("fields")) {
                record_field f;
                f.field_name = fj.at("field_name").get<std::string>();
                f.content = fj.at("content").get<std::string>();
                for (const auto& sj : fj.at("sentences")) {
                    f.sentences.push_back({sj.at("sid").get<std::string>(), sj.at("text").get<std::string>()});
                }
                d.fields.push_back(std::move(f));
            }
            record.documents.push_back(std::move(d));
        }
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed record: ") + e.what());
    }
}

std::string serialize(const unified_record& record) {
    return to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

unified_record parse_record(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("record is not JSON: ") + e.what());
    }
    return record_from_json(j);
}

}  // namespace lcds::ingest
