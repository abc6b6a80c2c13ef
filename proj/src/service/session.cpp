#include "lcds/service/session.hpp"

#include "lcds/core/error.hpp"

namespace lcds::service {

namespace {

constexpr std::array<session_state, 7> all_states{
    session_state::created,   session_state::uploaded, session_state::converted, session_state::configured,
    session_state::generated, session_state::reviewed, session_state::exported,
};

}  // namespace

std::string_view to_string(session_state state) noexcept {
    switch (state) {
        case session_state::created: return "created";
        case session_state::uploaded: return "uploaded";
        case session_state::converted: return "converted";
        case session_state::configured: return "configured";
        case session_state::generated: return "generated";
        case session_state::reviewed: return "reviewed";
        case session_state::exported: return "exported";
    }
    return "created";
}

session_state parse_session_state(std::string_view name) {
    for (auto s : all_states) {
        if (to_string(s) == name) return s;
    }
    throw error(error_code::parse_failure, "unknown session state '" + std::string(name) + "'");
}

// =============================================================================
// Config
// =============================================================================

nlohmann::ordered_json to_json(const session_config& config) {
    nlohmann::ordered_json j;
    j["department"] = config.department;
    j["provider"] = config.provider;
    j["multi_source"] = config.multi_source;
    nlohmann::ordered_json edits = nlohmann::ordered_json::object();
    for (const auto& [field, e] : config.rule_edits) {
        nlohmann::ordered_json ej;
        ej["replace"] = nlohmann::ordered_json::object();
        for (const auto& [rule_id, text] : e.replace) ej["replace"][rule_id] = text;
        ej["append"] = nlohmann::ordered_json::array();
        for (const auto& [type, text] : e.append) {
            ej["append"].push_back({{"logic_type", logic::to_string(type)}, {"text", text}});
        }
        edits[std::string(source_map::to_string(field))] = std::move(ej);
    }
    j["rule_edits"] = std::move(edits);
    return j;
}

session_config config_from_json(const nlohmann::json& j) {
    try {
        session_config c;
        c.department = j.at("department").get<std::string>();
        c.provider = j.value("provider", "mock");
        c.multi_source = j.value("multi_source", false);
        if (j.contains("rule_edits")) {
            for (const auto& [name, ej] : j["rule_edits"].items()) {
                logic::rule_edits e;
                if (ej.contains("replace")) {
                    for (const auto& [rule_id, text] : ej["replace"].items()) e.replace[rule_id] = text.get<std::string>();
                }
                if (ej.contains("append")) {
                    for (const auto& a : ej["append"]) {
                        e.append.emplace_back(logic::parse_logic_type(a.at("logic_type").get<std::string>()),
                                              a.at("text").get<std::string>());
                    }
                }
                c.rule_edits[source_map::parse_ds_field(name)] = std::move(e);
            }
        }
        if (c.department.empty()) throw error(error_code::parse_failure, "department is empty");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed config: ") + e.what());
    } catch (const error& e) {
        if (e.code() == error_code::parse_failure) throw;
        throw error(error_code::parse_failure, std::string("malformed config: ") + e.what());
    }
}

// =============================================================================
// Session
// =============================================================================

nlohmann::ordered_json to_json(const session& s) {
    nlohmann::ordered_json j;
    j["session_id"] = s.session_id;
    j["state"] = to_string(s.state);
    j["patient_id"] = s.patient_id;
    j["admission_id"] = s.admission_id;
    auto docs = nlohmann::ordered_json::array();
    for (const auto& d : s.documents) {
        nlohmann::ordered_json dj;
        dj["doc_id"] = d.doc_id;
        dj["doc_type"] = d.declared_type ? nlohmann::ordered_json(ingest::to_string(*d.declared_type))
                                         : nlohmann::ordered_json();
        dj["encoding"] = d.encoding;
        dj["payload"] = d.payload;
        docs.push_back(std::move(dj));
    }
    j["documents"] = std::move(docs);
    j["conversion_warnings"] = s.conversion_warnings;
    j["record"] = s.record ? nlohmann::ordered_json(ingest::to_json(*s.record)) : nlohmann::ordered_json();
    j["config"] = s.config ? to_json(*s.config) : nlohmann::ordered_json();
    j["silver"] = s.silver ? summary::to_json(*s.silver) : nlohmann::ordered_json();
    j["summary"] = s.summary ? summary::to_json(*s.summary) : nlohmann::ordered_json();
    j["attribution"] = s.attribution ? attribution::to_json(*s.attribution) : nlohmann::ordered_json();
    auto comments = nlohmann::ordered_json::array();
    for (const auto& c : s.comments) {
        comments.push_back(
            {{"gen_sid", c.gen_sid}, {"author", c.author}, {"text", c.text}, {"timestamp", c.timestamp}});
    }
    j["comments"] = std::move(comments);
    auto edits = nlohmann::ordered_json::array();
    for (const auto& e : s.edits) {
        edits.push_back({{"gen_sid", e.gen_sid},
                         {"old_text", e.old_text},
                         {"new_text", e.new_text},
                         {"author", e.author},
                         {"timestamp", e.timestamp}});
    }
    j["edits"] = std::move(edits);
    j["golden_record"] = s.golden_record ? *s.golden_record : nlohmann::ordered_json();
    j["created_at"] = s.created_at;
    j["updated_at"] = s.updated_at;
    return j;
}

session session_from_json(const nlohmann::json& j) {
    try {
        session s;
        s.session_id = j.at("session_id").get<std::string>();
        s.state = parse_session_state(j.at("state").get<std::string>());
        s.patient_id = j.value("patient_id", "");
        s.admission_id = j.value("admission_id", "");
        for (const auto& dj : j.at("documents")) {
            ingest::raw_document d;
            d.doc_id = dj.at("doc_id").get<std::string>();
            if (!dj.at("doc_type").is_null()) d.declared_type = ingest::parse_doc_type(dj["doc_type"].get<std::string>());
            d.encoding = dj.value("encoding", "utf-8");
            d.payload = dj.at("payload").get<std::string>();
            s.documents.push_back(std::move(d));
        }
        s.conversion_warnings = j.value("conversion_warnings", std::vector<std::string>{});
        if (!j.at("record").is_null()) s.record = ingest::record_from_json(j["record"]);
        if (!j.at("config").is_null()) s.config = config_from_json(j["config"]);
        if (!j.at("silver").is_null()) s.silver = summary::summary_from_json(j["silver"]);
        if (!j.at("summary").is_null()) s.summary = summary::summary_from_json(j["summary"]);
        if (!j.at("attribution").is_null()) s.attribution = attribution::attribution_from_json(j["attribution"]);
        for (const auto& c : j.at("comments")) {
            s.comments.push_back({c.at("gen_sid").get<std::string>(), c.at("author").get<std::string>(),
                                  c.at("text").get<std::string>(), c.at("timestamp").get<std::string>()});
        }
        for (const auto& e : j.at("edits")) {
            s.edits.push_back({e.at("gen_sid").get<std::string>(), e.at("old_text").get<std::string>(),
                               e.at("new_text").get<std::string>(), e.at("author").get<std::string>(),
                               e.at("timestamp").get<std::string>()});
        }
        if (!j.at("golden_record").is_null()) s.golden_record = nlohmann::ordered_json(j["golden_record"]);
        s.created_at = j.value("created_at", "");
        s.updated_at = j.value("updated_at", "");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::parse_failure, std::string("malformed session: ") + e.what());
    }
}

nlohmann::ordered_json make_golden_record(const session& s, const std::string& reviewer_id,
                                          const std::string& exported_at) {
    auto golden = *s.summary;
    golden.status = summary::summary_status::golden;

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["session_id"] = s.session_id;
    j["patient_id"] = s.record ? s.record->patient_id : s.patient_id;
    j["admission_id"] = s.record ? s.record->admission_id : s.admission_id;
    j["department"] = s.config ? s.config->department : golden.department;
    j["reviewer_id"] = reviewer_id;
    j["silver"] = summary::to_json(s.silver ? *s.silver : *s.summary);
    j["golden"] = summary::to_json(golden);
    j["attribution"] = s.attribution ? attribution::to_json(*s.attribution) : nlohmann::ordered_json();
    auto session_json = to_json(s);
    j["comments"] = session_json["comments"];
    j["edits"] = session_json["edits"];
    j["created_at"] = s.created_at;
    j["exported_at"] = exported_at;
    return j;
}

}  // namespace lcds::service
