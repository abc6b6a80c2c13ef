#include "lcds/gateway/http_provider.hpp"

#include <httplib.h>

#include <cstdlib>

namespace lcds::gateway {

http_provider::http_provider(provider_config config) : config_(std::move(config)) {
    config_.validate();
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw error(error_code::invalid_argument, "endpoint must be an absolute URL: " + config_.endpoint);
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : config_.endpoint.substr(path_start);
}

nlohmann::json http_provider::request_body(const completion_request& request) const {
    return {
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"stream", false},
    };
}

completion_response http_provider::parse_response_body(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw provider_failure(provider_failure::kind::permanent, 200, "response has no choices");
    }
    const auto& message = j["choices"][0].value("message", nlohmann::json::object());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw provider_failure(provider_failure::kind::permanent, 200, "response has no message content");
    }
    completion_response out;
    out.text = message["content"].get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        out.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return out;
}

completion_response http_provider::send(const completion_request& request, std::chrono::milliseconds timeout) {
    httplib::Client client(scheme_host_port_);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (const char* token = std::getenv(config_.auth_token_env.c_str()); token != nullptr && *token != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path_, headers, request_body(request).dump(), "application/json");
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - started;

    if (!result) {
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
            throw provider_failure(provider_failure::kind::timeout, 0, "request timed out: " + httplib::to_string(err));
        }
        throw provider_failure(provider_failure::kind::transient, 0, "transport failure: " + httplib::to_string(err));
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
        throw provider_failure(provider_failure::kind::transient, status, "server returned " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
        throw provider_failure(provider_failure::kind::permanent, status, "server returned " + std::to_string(status));
    }
    auto response = parse_response_body(result->body);
    response.provider_id = id();
    response.latency_ms = elapsed.count();
    return response;
}

}  // namespace lcds::gateway
