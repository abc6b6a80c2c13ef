#include "lcds/summary/discharge_summary.hpp"

#include "lcds/core/error.hpp"
#include "lcds/segmentation/sentence_splitter.hpp"

#include <set>

namespace lcds::summary {

std::string_view to_string(summary_status status) noexcept {
    return status == summary_status::golden ? "golden" : "silver";
}

std::string_view to_string(sentence_kind kind) noexcept {
    return kind == sentence_kind::knowledge ? "knowledge" : "generated";
}

// =============================================================================
// Lookup
// =============================================================================

summary_field* discharge_summary::find(source_map::ds_field field) {
    for (auto& f : fields) {
        if (f.field == field) return &f;
    }
    return nullptr;
}

const summary_field* discharge_summary::find(source_map::ds_field field) const {
    return const_cast<discharge_summary*>(this)->find(field);
}

summary_sentence* discharge_summary::find_sentence(std::string_view sid) {
    for (auto& f : fields) {
        for (auto& s : f.sentences) {
            if (s.sid == sid) return &s;
        }
    }
    return nullptr;
}

const summary_sentence* discharge_summary::find_sentence(std::string_view sid) const {
    return const_cast<discharge_summary*>(this)->find_sentence(sid);
}

void refresh_text(summary_field& field) {
    std::vector<std::string> texts;
    texts.reserve(field.sentences.size());
    for (const auto& s : field.sentences) texts.push_back(s.text);
    field.text = segmentation::join_sentences(texts);
}

// =============================================================================
// Validation
// =============================================================================

std::vector<std::string> validate_summary(const discharge_summary& summary) {
    std::vector<std::string> problems;
    if (summary.summary_id.empty()) problems.emplace_back("summary_id is empty");
    std::set<source_map::ds_field> present;
    std::set<std::string> sids;
    for (const auto& f : summary.fields) {
        const auto name = std::string(source_map::to_string(f.field));
        if (!present.insert(f.field).second) problems.push_back("field " + name + " appears twice");
        std::vector<std::string> texts;
        for (const auto& s : f.sentences) {
            texts.push_back(s.text);
            if (!s.sid.empty() && !sids.insert(s.sid).second) problems.push_back("duplicate sentence id " + s.sid);
        }
        if (segmentation::join_sentences(texts) != f.text) {
            problems.push_back("field " + name + " text differs from its sentences");
        }
    }
    for (const auto f : source_map::all_ds_fields) {
        if (present.count(f) == 0) problems.push_back("field " + std::string(source_map::to_string(f)) + " missing");
    }
    return problems;
}

// =============================================================================
// JSON
// =============================================================================

nlohmann::ordered_json to_json(const discharge_summary& summary) {
    nlohmann::ordered_json j;
    j["schema_version"] = summary_schema_version;
    j["summary_id"] = summary.summary_id;
    j["department"] = summary.department;
    j["status"] = to_string(summary.status);
    auto fields = nlohmann::ordered_json::array();
    for (const auto& f : summary.fields) {
        nlohmann::ordered_json fj;
        fj["ds_field"] = source_map::to_string(f.field);
        fj["text"] = f.text;
        fj["plan_id"] = f.plan_id;
        fj["source_unavailable"] = f.source_unavailable;
        fj["error"] = f.error ? nlohmann::ordered_json(*f.error) : nlohmann::ordered_json();
        fj["diagnostics"] = f.diagnostics;
        fj["source_fields"] = f.source_fields;
        auto sentences = nlohmann::ordered_json::array();
        for (const auto& s : f.sentences) {
            nlohmann::ordered_json sj;
            sj["sid"] = s.sid;
            sj["text"] = s.text;
            sj["kind"] = to_string(s.kind);
            sj["sources"] = s.sources;
            sentences.push_back(std::move(sj));
        }
        fj["sentences"] = std::move(sentences);
        fields.push_back(std::move(fj));
    }
    j["fields"] = std::move(fields);
    return j;
}

discharge_summary summary_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != summary_schema_version) {
            throw error(error_code::parse_failure, "unsupported summary schema_version");
        }
        discharge_summary out;
        out.summary_id = j.at("summary_id").get<std::string>();
        out.department = j.at("department").get<std::string>();
        const auto status = j.at("status").get<std::string>();
        if (status != "silver" && status != "golden") throw error(error_code::parse_failure, "bad status " + status);
        out.status = status == "golden" ? summary_status::golden : summary_status::silver;
        for (const auto& fj : j.at("fields")) {
            summary_field f;
            f.field = source_map::parse_ds_field(fj.at("ds_field").get<std::string>());
            f.text = fj.at("text").get<std::string>();
            f.plan_id = fj.value("plan_id", "");
            f.source_unavailable = fj.value("source_unavailable", false);
            if (fj.contains("error") && !fj["error"].is_null()) f.error = fj["error"].get<std::string>();
            f.diagnostics = fj.value("diagnostics", std::vector<std::string>{});
            f.source_fields = fj.value("source_fields", std::vector<std::string>{});
            for (const auto& sj : fj.at("sentences")) {
                summary_sentence s;
                s.sid = sj.value("sid", "");
                s.text = sj.at("text").get<std::string>();
                const auto kind = sj.value("kind", "generated");
                if (kind != "generated" && kind != "knowledge") throw error(error_code::parse_failure, "bad kind " + kind);
                s.kind = kind == "knowledge" ? sentence_kind::knowledge : sentence_kind::generated;
                s.sources = sj.value("sources", std::vector<std::string>{});
                f.sentences.push_back(std::move(s));
            }
            out.fields.push_back(std::move(f));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed summary: ") + e.what());
    } catch (const error& e) {
        if (e.code() == error_code::parse_failure) throw;
        throw error(error_code::parse_failure, std::string("malformed summary: ") + e.what());
    }
}

std::string serialize(const discharge_summary& summary) {
    return to_json(summary).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

discharge_summary parse_summary(std::string_view text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw error(error_code::parse_failure, "summary is not valid JSON");
    return summary_from_json(j);
}

}  // namespace lcds::summary
