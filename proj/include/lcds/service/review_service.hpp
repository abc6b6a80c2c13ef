/**
 * @file review_service.hpp
 * @brief Review workflow over HTTP with file-backed sessions
 *
 * Layout under the data directory:
 *
 *     sessions/<session_id>.json   one document per session, rewritten atomically
 *     dataset.jsonl                exported golden records, one per line
 *
 * Department resources (rules.json, knowledge.json, mapping.json) are read
 * from `<resources>/<department>/`.
 *
 * Status codes: 400 for a call the session state does not allow, 404 for an
 * unknown session or sentence, 422 for a malformed body, 502 when every
 * field failed to generate.
 */

#pragma once

#include "lcds/gateway/completion.hpp"
#include "lcds/service/session.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace lcds::service {

struct service_options {
    std::filesystem::path data_dir;
    /// Defaults to `<data_dir>/departments`.
    std::filesystem::path resources_dir;
    /// ISO-8601 timestamps; tests pin this for byte-stable output.
    std::function<std::string()> clock;
    /// Provider by configured name; defaults to mock and http.
    std::function<std::shared_ptr<gateway::completion_provider>(const std::string&)> provider_factory;
    gateway::provider_config provider_config;
    /// Called after the dataset temp file is written and before it replaces the dataset.
    std::function<void()> before_dataset_rename;
};

struct reply {
    int status = 200;
    nlohmann::ordered_json body;
};

class review_service {
public:
    explicit review_service(service_options options);

    reply create_session(const nlohmann::json& body);
    reply get_session(const std::string& id);
    reply upload_documents(const std::string& id, const nlohmann::json& body);
    reply convert(const std::string& id);
    reply get_config(const std::string& id);
    reply put_config(const std::string& id, const nlohmann::json& body);
    reply generate(const std::string& id);
    reply get_summary(const std::string& id);
    reply get_attribution(const std::string& id);
    reply edit_sentence(const std::string& id, const std::string& sid, const nlohmann::json& body,
                        const std::string& reviewer);
    reply add_comment(const std::string& id, const nlohmann::json& body, const std::string& reviewer);
    reply export_golden(const std::string& id, const std::string& reviewer);
    reply dataset();

    /// Registers every route on the server.
    void bind(httplib::Server& server);

    [[nodiscard]] std::filesystem::path dataset_path() const;

private:
    struct slot {
        std::mutex mutex;
        session data;
    };

    std::shared_ptr<slot> find(const std::string& id);
    void persist(const session& s) const;
    void append_dataset_line(const std::string& session_id, const std::string& line);
    [[nodiscard]] std::string now() const;

    service_options options_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<slot>> sessions_;
    std::uint64_t next_id_ = 1;
    std::mutex dataset_mutex_;
};

}  // namespace lcds::service
