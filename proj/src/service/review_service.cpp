#include "lcds/service/review_service.hpp"

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/core/text.hpp"
#include "lcds/gateway/http_provider.hpp"
#include "lcds/gateway/mock_provider.hpp"
#include "lcds/source_map/resolver.hpp"
#include "lcds/summary/summarizer.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

namespace lcds::service {

namespace {

/// Rejection carrying its HTTP status.
class http_error : public std::runtime_error {
public:
    http_error(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}

    [[nodiscard]] int status() const noexcept { return status_; }
    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

[[noreturn]] void reject(int status, std::string code, const std::string& message) {
    throw http_error(status, std::move(code), message);
}

reply error_reply(int status, std::string_view code, const std::string& message) {
    reply r;
    r.status = status;
    r.body["error"] = code;
    r.body["message"] = message;
    return r;
}

int status_for(error_code code) {
    switch (code) {
        case error_code::invalid_argument:
        case error_code::parse_failure:
        case error_code::unrecognized_format:
        case error_code::conversion_failure:
        case error_code::duplicate_doc_id:
        case error_code::unparseable_rule:
            return 422;
        case error_code::unknown_sentence:
            return 404;
        case error_code::not_generated:
            return 400;
        case error_code::generation_failed:
            return 502;
        default:
            return 500;
    }
}

template <typename F>
reply guarded(F&& f) {
    try {
        return f();
    } catch (const http_error& e) {
        return error_reply(e.status(), e.code(), e.what());
    } catch (const error& e) {
        return error_reply(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return error_reply(422, "InvalidPayload", e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "InternalError", e.what());
    }
}

void require_state(const session& s, std::initializer_list<session_state> allowed, std::string_view action) {
    for (auto a : allowed) {
        if (s.state == a) return;
    }
    reject(400, "InvalidTransition",
           std::string(action) + " is not allowed in state " + std::string(to_string(s.state)));
}

bool has_summary_state(const session& s) {
    return s.state == session_state::generated || s.state == session_state::reviewed ||
           s.state == session_state::exported;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::ordered_json state_body(const session& s) {
    nlohmann::ordered_json j;
    j["session_id"] = s.session_id;
    j["state"] = to_string(s.state);
    return j;
}

const std::string& require_string(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        reject(422, "InvalidPayload", std::string("\"") + key + "\" must be a string");
    }
    return j[key].get_ref<const std::string&>();
}

}  // namespace

// =============================================================================
// Construction and storage
// =============================================================================

review_service::review_service(service_options options) : options_(std::move(options)) {
    if (options_.data_dir.empty()) throw error(error_code::invalid_argument, "data_dir is required");
    if (options_.resources_dir.empty()) options_.resources_dir = options_.data_dir / "departments";
    if (!options_.clock) options_.clock = utc_now;
    if (!options_.provider_factory) {
        const auto config = options_.provider_config;
        options_.provider_factory = [config](const std::string& name) -> std::shared_ptr<gateway::completion_provider> {
            if (name == "mock") return std::make_shared<gateway::mock_provider>();
            if (name == "http") return std::make_shared<gateway::http_provider>(config);
            throw error(error_code::invalid_argument, "unknown provider '" + name + "'");
        };
    }
    const auto dir = options_.data_dir / "sessions";
    std::filesystem::create_directories(dir);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        auto s = session_from_json(nlohmann::json::parse(io::read_file(entry.path())));
        if (s.session_id.size() > 1 && s.session_id.front() == 's') {
            next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(s.session_id.substr(1)) + 1);
        }
        auto slot_ptr = std::make_shared<slot>();
        slot_ptr->data = std::move(s);
        sessions_.emplace(slot_ptr->data.session_id, std::move(slot_ptr));
    }
}

std::filesystem::path review_service::dataset_path() const { return options_.data_dir / "dataset.jsonl"; }

std::string review_service::now() const { return options_.clock(); }

std::shared_ptr<review_service::slot> review_service::find(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) reject(404, "UnknownSession", "no session " + id);
    return it->second;
}

void review_service::persist(const session& s) const {
    io::write_file_atomic(options_.data_dir / "sessions" / (s.session_id + ".json"),
                          to_json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

void review_service::append_dataset_line(const std::string& session_id, const std::string& line) {
    std::lock_guard lock(dataset_mutex_);
    std::string existing;
    if (std::filesystem::exists(dataset_path())) existing = io::read_file(dataset_path());
    std::istringstream in(existing);
    for (std::string l; std::getline(in, l);) {
        const auto j = nlohmann::json::parse(l, nullptr, false);
        // A line from an interrupted earlier export of the same session.
        if (!j.is_discarded() && j.value("session_id", "") == session_id) return;
    }
    if (!existing.empty() && existing.back() != '\n') existing += '\n';
    io::write_file_atomic(dataset_path(), existing + line + "\n", options_.before_dataset_rename);
}

// =============================================================================
// Endpoints
// =============================================================================

reply review_service::create_session(const nlohmann::json& body) {
    return guarded([&] {
        if (!body.is_null() && !body.is_object()) reject(422, "InvalidPayload", "body must be an object");
        auto slot_ptr = std::make_shared<slot>();
        auto& s = slot_ptr->data;
        {
            std::lock_guard lock(sessions_mutex_);
            char buf[16];
            std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
            s.session_id = buf;
            sessions_.emplace(s.session_id, slot_ptr);
        }
        std::lock_guard lock(slot_ptr->mutex);
        if (body.is_object()) {
            s.patient_id = body.value("patient_id", "");
            s.admission_id = body.value("admission_id", "");
        }
        s.created_at = s.updated_at = now();
        persist(s);
        return reply{201, state_body(s)};
    });
}

reply review_service::get_session(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        const auto& s = slot_ptr->data;
        auto body = state_body(s);
        body["patient_id"] = s.patient_id;
        body["admission_id"] = s.admission_id;
        body["documents"] = s.documents.size();
        body["comments"] = s.comments.size();
        body["edits"] = s.edits.size();
        return reply{200, body};
    });
}

reply review_service::upload_documents(const std::string& id, const nlohmann::json& body) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::created, session_state::uploaded}, "upload");
        if (!body.is_object() || !body.contains("documents") || !body["documents"].is_array() ||
            body["documents"].empty()) {
            reject(422, "InvalidPayload", "\"documents\" must be a non-empty array");
        }
        std::vector<ingest::raw_document> incoming;
        std::set<std::string> ids;
        for (const auto& d : s.documents) ids.insert(d.doc_id);
        for (const auto& dj : body["documents"]) {
            ingest::raw_document d;
            d.doc_id = require_string(dj, "doc_id");
            d.payload = require_string(dj, "payload");
            if (d.doc_id.empty() || d.payload.empty()) reject(422, "InvalidPayload", "doc_id and payload must be non-empty");
            if (dj.contains("doc_type") && !dj["doc_type"].is_null()) {
                const auto t = ingest::try_parse_doc_type(require_string(dj, "doc_type"));
                if (!t) reject(422, "InvalidPayload", "unknown doc_type for " + d.doc_id);
                d.declared_type = *t;
            }
            if (dj.contains("encoding")) d.encoding = require_string(dj, "encoding");
            if (!ids.insert(d.doc_id).second) reject(422, "DuplicateDocId", "duplicate doc_id " + d.doc_id);
            incoming.push_back(std::move(d));
        }
        if (body.contains("patient_id")) s.patient_id = require_string(body, "patient_id");
        if (body.contains("admission_id")) s.admission_id = require_string(body, "admission_id");
        std::move(incoming.begin(), incoming.end(), std::back_inserter(s.documents));
        s.state = session_state::uploaded;
        s.updated_at = now();
        persist(s);
        auto out = state_body(s);
        out["documents"] = s.documents.size();
        return reply{200, out};
    });
}

reply review_service::convert(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::uploaded}, "convert");
        std::vector<ingest::unified_document> docs;
        std::vector<std::string> warnings;
        for (const auto& raw : s.documents) {
            auto converted = ingest::convert_document(raw);
            for (auto& w : converted.warnings) warnings.push_back(raw.doc_id + ": " + w);
            docs.push_back(std::move(converted.document));
        }
        const auto patient = s.patient_id.empty() ? "P-" + s.session_id : s.patient_id;
        const auto admission = s.admission_id.empty() ? "A-" + s.session_id : s.admission_id;
        s.record = ingest::build_record(std::move(docs), patient, admission);
        s.conversion_warnings = std::move(warnings);
        s.state = session_state::converted;
        s.updated_at = now();
        persist(s);
        auto out = state_body(s);
        out["record"] = ingest::to_json(*s.record);
        out["warnings"] = s.conversion_warnings;
        return reply{200, out};
    });
}

reply review_service::get_config(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        const auto& s = slot_ptr->data;
        auto out = state_body(s);
        out["config"] = s.config ? to_json(*s.config) : nlohmann::ordered_json();
        std::vector<std::string> departments;
        if (std::filesystem::is_directory(options_.resources_dir)) {
            for (const auto& entry : std::filesystem::directory_iterator(options_.resources_dir)) {
                if (std::filesystem::exists(entry.path() / "rules.json")) {
                    departments.push_back(entry.path().filename().string());
                }
            }
        }
        std::sort(departments.begin(), departments.end());
        out["departments"] = departments;
        return reply{200, out};
    });
}

reply review_service::put_config(const std::string& id, const nlohmann::json& body) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::converted, session_state::configured}, "configure");
        auto config = config_from_json(body);
        const auto dir = options_.resources_dir / config.department;
        if (config.department.find('/') != std::string::npos || config.department.find("..") != std::string::npos ||
            !std::filesystem::exists(dir / "rules.json")) {
            reject(422, "UnknownDepartment", "no resources for department " + config.department);
        }
        const auto department = logic::load_department(dir);
        for (const auto& [field, edits] : config.rule_edits) (void)logic::apply_edits(department.rules, field, edits);
        (void)options_.provider_factory(config.provider);
        s.config = std::move(config);
        s.state = session_state::configured;
        s.updated_at = now();
        persist(s);
        auto out = state_body(s);
        out["config"] = to_json(*s.config);
        return reply{200, out};
    });
}

reply review_service::generate(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::configured}, "generate");
        const auto dir = options_.resources_dir / s.config->department;
        const auto department = logic::load_department(dir);
        source_map::mapping_table table;
        table.department = s.config->department;
        if (std::filesystem::exists(dir / "mapping.json")) table = source_map::parse_table(io::read_file(dir / "mapping.json"));

        const gateway::completion_gateway gateway(options_.provider_factory(s.config->provider), options_.provider_config);
        summary::generation_options gen;
        gen.multi_source = s.config->multi_source;
        gen.edits = s.config->rule_edits;
        auto generated = summary::generate_summary(*s.record, table, department, gateway, gen);
        auto map = attribution::build_attribution_map(generated, *s.record, &gateway);

        s.silver = generated;
        s.summary = std::move(generated);
        s.attribution = std::move(map);
        s.state = session_state::generated;
        s.updated_at = now();
        persist(s);
        auto out = state_body(s);
        out["summary"] = summary::to_json(*s.summary);
        out["attribution"] = attribution::to_json(*s.attribution);
        return reply{200, out};
    });
}

reply review_service::get_summary(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        const auto& s = slot_ptr->data;
        if (!has_summary_state(s)) reject(400, "NotGenerated", "no summary yet");
        return reply{200, summary::to_json(*s.summary)};
    });
}

reply review_service::get_attribution(const std::string& id) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        const auto& s = slot_ptr->data;
        if (!has_summary_state(s)) reject(400, "NotGenerated", "no attribution yet");
        return reply{200, attribution::to_json(*s.attribution)};
    });
}

reply review_service::edit_sentence(const std::string& id, const std::string& sid, const nlohmann::json& body,
                                    const std::string& reviewer) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::generated, session_state::reviewed}, "edit");
        const auto new_text = text::trim(require_string(body, "text"));
        if (new_text.empty()) reject(422, "InvalidPayload", "\"text\" must not be blank");

        summary::summary_field* owner = nullptr;
        summary::summary_sentence* target = nullptr;
        for (auto& f : s.summary->fields) {
            for (auto& sentence : f.sentences) {
                if (sentence.sid == sid) {
                    owner = &f;
                    target = &sentence;
                }
            }
        }
        if (target == nullptr) throw error(error_code::unknown_sentence, "UnknownSentence: " + sid);

        edit_record edit{sid, target->text, new_text, reviewer, now()};
        target->text = new_text;
        summary::refresh_text(*owner);

        const auto pool = attribution::candidate_pool(*owner, *s.record, attribution::attribution_scope::resolved);
        const auto scored = attribution::attribute_lexical(new_text, pool);
        target->sources.clear();
        for (const auto& [source, score] : scored) target->sources.push_back(source);

        attribution::attribution_entry entry{sid, target->sources, attribution::attribution_method::lexical,
                                             scored.empty() ? 0.0 : scored.front().second};
        bool replaced = false;
        for (auto& e : s.attribution->entries) {
            if (e.gen_sid == sid) {
                e = entry;
                replaced = true;
            }
        }
        if (!replaced) s.attribution->entries.push_back(entry);

        s.edits.push_back(std::move(edit));
        s.state = session_state::reviewed;
        s.updated_at = now();
        persist(s);

        auto out = state_body(s);
        out["sentence"] = {{"sid", sid}, {"text", target->text}, {"sources", target->sources}};
        out["confidence"] = entry.confidence;
        out["ungrounded"] = entry.sources.empty();
        out["history_length"] = s.edits.size();
        return reply{200, out};
    });
}

reply review_service::add_comment(const std::string& id, const nlohmann::json& body, const std::string& reviewer) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        require_state(s, {session_state::generated, session_state::reviewed}, "comment");
        const auto& sid = require_string(body, "gen_sid");
        const auto comment_text = text::trim(require_string(body, "text"));
        if (comment_text.empty()) reject(422, "InvalidPayload", "\"text\" must not be blank");
        if (s.summary->find_sentence(sid) == nullptr) throw error(error_code::unknown_sentence, "UnknownSentence: " + sid);
        s.comments.push_back({sid, reviewer, comment_text, now()});
        s.state = session_state::reviewed;
        s.updated_at = now();
        persist(s);
        auto out = state_body(s);
        out["comments"] = s.comments.size();
        return reply{201, out};
    });
}

reply review_service::export_golden(const std::string& id, const std::string& reviewer) {
    return guarded([&] {
        auto slot_ptr = find(id);
        std::lock_guard lock(slot_ptr->mutex);
        auto& s = slot_ptr->data;
        if (s.state == session_state::exported) return reply{200, *s.golden_record};
        if (!has_summary_state(s)) throw error(error_code::not_generated, "NotGenerated: nothing to export");

        const auto exported_at = now();
        auto golden = make_golden_record(s, reviewer, exported_at);
        const auto problems = summary::validate_summary(summary::summary_from_json(golden["golden"]));
        if (!problems.empty()) reject(500, "InvalidGolden", problems.front());

        append_dataset_line(s.session_id, golden.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
        s.golden_record = golden;
        s.state = session_state::exported;
        s.updated_at = exported_at;
        persist(s);
        return reply{200, golden};
    });
}

reply review_service::dataset() {
    return guarded([&] {
        nlohmann::ordered_json out;
        auto records = nlohmann::ordered_json::array();
        {
            std::lock_guard lock(dataset_mutex_);
            if (std::filesystem::exists(dataset_path())) {
                std::istringstream in(io::read_file(dataset_path()));
                for (std::string line; std::getline(in, line);) {
                    if (!line.empty()) records.push_back(nlohmann::ordered_json::parse(line));
                }
            }
        }
        out["count"] = records.size();
        out["records"] = std::move(records);
        return reply{200, out};
    });
}

// =============================================================================
// HTTP binding
// =============================================================================

void review_service::bind(httplib::Server& server) {
    using httplib::Request;
    using httplib::Response;

    auto send = [](Response& res, const reply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), "application/json");
    };
    // Returns false (and answers 422) when the body is not JSON.
    auto parse_body = [](const Request& req, Response& res, nlohmann::json& out) {
        if (text::trim(req.body).empty()) {
            out = nlohmann::json::object();
            return true;
        }
        out = nlohmann::json::parse(req.body, nullptr, false);
        if (!out.is_discarded()) return true;
        res.status = 422;
        res.set_content(R"({"error":"InvalidPayload","message":"body is not valid JSON"})", "application/json");
        return false;
    };
    auto reviewer = [](const Request& req) {
        auto id = req.get_header_value("X-Reviewer-Id");
        return id.empty() ? std::string("anonymous") : id;
    };

    const std::string session = R"(/api/sessions/([^/]+))";

    server.Post("/api/sessions", [=, this](const Request& req, Response& res) {
        nlohmann::json body;
        if (parse_body(req, res, body)) send(res, create_session(body));
    });
    server.Get(session, [=, this](const Request& req, Response& res) { send(res, get_session(req.matches[1])); });
    server.Post(session + "/documents", [=, this](const Request& req, Response& res) {
        nlohmann::json body;
        if (parse_body(req, res, body)) send(res, upload_documents(req.matches[1], body));
    });
    server.Post(session + "/convert",
                [=, this](const Request& req, Response& res) { send(res, convert(req.matches[1])); });
    server.Get(session + "/config",
               [=, this](const Request& req, Response& res) { send(res, get_config(req.matches[1])); });
    server.Put(session + "/config", [=, this](const Request& req, Response& res) {
        nlohmann::json body;
        if (parse_body(req, res, body)) send(res, put_config(req.matches[1], body));
    });
    server.Post(session + "/generate",
                [=, this](const Request& req, Response& res) { send(res, generate(req.matches[1])); });
    server.Get(session + "/summary",
               [=, this](const Request& req, Response& res) { send(res, get_summary(req.matches[1])); });
    server.Get(session + "/attribution",
               [=, this](const Request& req, Response& res) { send(res, get_attribution(req.matches[1])); });
    server.Put(session + "/sentences/(.+)", [=, this](const Request& req, Response& res) {
        nlohmann::json body;
        if (parse_body(req, res, body)) send(res, edit_sentence(req.matches[1], req.matches[2], body, reviewer(req)));
    });
    server.Post(session + "/comments", [=, this](const Request& req, Response& res) {
        nlohmann::json body;
        if (parse_body(req, res, body)) send(res, add_comment(req.matches[1], body, reviewer(req)));
    });
    server.Post(session + "/export", [=, this](const Request& req, Response& res) {
        send(res, export_golden(req.matches[1], reviewer(req)));
    });
    server.Get("/api/dataset", [=, this](const Request&, Response& res) { send(res, dataset()); });
}

}  // namespace lcds::service
