#include "lcds/source_map/mapping_table.hpp"

#include "lcds/core/error.hpp"

#include <tuple>

namespace lcds::source_map {

// =============================================================================
// ds_field
// =============================================================================

std::string_view to_string(ds_field field) noexcept {
    switch (field) {
        case ds_field::patient_info: return "patient_info";
        case ds_field::discharge_diagnosis: return "discharge_diagnosis";
        case ds_field::tests_examinations: return "tests_examinations";
        case ds_field::course_treatment: return "course_treatment";
        case ds_field::discharge_condition: return "discharge_condition";
        case ds_field::medication_advice: return "medication_advice";
    }
    return "patient_info";
}

std::string_view display_name(ds_field field) noexcept {
    switch (field) {
        case ds_field::patient_info: return "Patient Information";
        case ds_field::discharge_diagnosis: return "Discharge Diagnosis";
        case ds_field::tests_examinations: return "Tests and Examinations";
        case ds_field::course_treatment: return "Course and Treatment";
        case ds_field::discharge_condition: return "Discharge Condition";
        case ds_field::medication_advice: return "Medication Advice";
    }
    return "Patient Information";
}

std::optional<ds_field> try_parse_ds_field(std::string_view name) noexcept {
    for (auto f : all_ds_fields) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

ds_field parse_ds_field(std::string_view name) {
    if (auto f = try_parse_ds_field(name)) return *f;
    throw error(error_code::invalid_argument, "unknown ds_field '" + std::string(name) + "'");
}

bool is_short_field(ds_field field) noexcept {
    return field == ds_field::patient_info || field == ds_field::discharge_diagnosis ||
           field == ds_field::discharge_condition;
}

// =============================================================================
// source_ref
// =============================================================================

std::string source_ref::str() const { return std::string(ingest::to_string(type)) + "/" + field_name; }

std::strong_ordering operator<=>(const source_ref& a, const source_ref& b) {
    if (auto c = ingest::to_string(a.type).compare(ingest::to_string(b.type)); c != 0) {
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.field_name <=> b.field_name;
}

// =============================================================================
// mapping_table
// =============================================================================

const mapping_entry* mapping_table::find(ds_field field, const std::optional<std::string>& label) const {
    for (const auto& e : entries) {
        if (e.field == field && e.segment_label == label) return &e;
    }
    return nullptr;
}

std::vector<const mapping_entry*> mapping_table::entries_for(ds_field field) const {
    std::vector<const mapping_entry*> out;
    for (const auto& e : entries) {
        if (e.field == field) out.push_back(&e);
    }
    return out;
}

nlohmann::ordered_json to_json(const mapping_table& table) {
    nlohmann::ordered_json j;
    j["schema_version"] = mapping_schema_version;
    j["department"] = table.department;
    j["version"] = table.version;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : table.entries) {
        nlohmann::ordered_json ej;
        ej["ds_field"] = to_string(e.field);
        ej["segment_label"] = e.segment_label ? nlohmann::ordered_json(*e.segment_label) : nlohmann::ordered_json();
        auto sources = nlohmann::ordered_json::array();
        for (const auto& s : e.sources) {
            nlohmann::ordered_json sj;
            sj["doc_type"] = ingest::to_string(s.source.type);
            sj["field_name"] = s.source.field_name;
            sj["priority_num"] = s.priority.num;
            sj["priority_den"] = s.priority.den;
            sj["mean_similarity"] = s.mean_similarity;
            sources.push_back(std::move(sj));
        }
        ej["sources"] = std::move(sources);
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return j;
}

mapping_table table_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != mapping_schema_version) {
            throw error(error_code::parse_failure, "unsupported mapping table schema_version");
        }
        mapping_table table;
        table.department = j.at("department").get<std::string>();
        table.version = j.at("version").get<int>();
        for (const auto& ej : j.at("entries")) {
            mapping_entry e;
            e.field = parse_ds_field(ej.at("ds_field").get<std::string>());
            if (!ej.at("segment_label").is_null()) e.segment_label = ej["segment_label"].get<std::string>();
            for (const auto& sj : ej.at("sources")) {
                ranked_source s;
                s.source.type = ingest::parse_doc_type(sj.at("doc_type").get<std::string>());
                s.source.field_name = sj.at("field_name").get<std::string>();
                s.priority.num = sj.at("priority_num").get<std::int64_t>();
                s.priority.den = sj.at("priority_den").get<std::int64_t>();
                s.mean_similarity = sj.at("mean_similarity").get<double>();
                if (s.source.field_name.empty() || s.priority.den <= 0 || s.priority.num <= 0 ||
                    s.priority.num > s.priority.den) {
                    throw error(error_code::parse_failure, "invalid source in mapping entry " +
                                                               std::string(to_string(e.field)));
                }
                e.sources.push_back(std::move(s));
            }
            table.entries.push_back(std::move(e));
        }
        return table;
    } catch (const nlohmann::json::exception& ex) {
        throw error(error_code::parse_failure, std::string("malformed mapping table: ") + ex.what());
    } catch (const error& ex) {
        if (ex.code() == error_code::parse_failure) throw;
        throw error(error_code::parse_failure, std::string("malformed mapping table: ") + ex.what());
    }
}

std::string serialize(const mapping_table& table) {
    return to_json(table).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

mapping_table parse_table(std::string_view text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw error(error_code::parse_failure, "mapping table is not valid JSON");
    return table_from_json(j);
}

}  // namespace lcds::source_map
