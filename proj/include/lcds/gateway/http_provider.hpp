/**
 * @file http_provider.hpp
 * @brief Chat-completion provider over HTTP
 *
 * Speaks the widely implemented chat-completions wire format: one user
 * message in, choices[0].message.content out. Any backend that exposes this
 * endpoint (a local fine-tuned model server or a hosted model) can be
 * swapped in through provider_config alone.
 */

#pragma once

#include "lcds/gateway/completion.hpp"

#include <nlohmann/json.hpp>

namespace lcds::gateway {

class http_provider : public completion_provider {
public:
    explicit http_provider(provider_config config);

    [[nodiscard]] std::string id() const override { return "http:" + config_.model; }

    completion_response send(const completion_request& request, std::chrono::milliseconds timeout) override;

    /// Request body for the chat-completions endpoint.
    [[nodiscard]] nlohmann::json request_body(const completion_request& request) const;

    /// Extracts the reply text and token usage. Throws provider_failure on a malformed body.
    [[nodiscard]] static completion_response parse_response_body(const std::string& body);

private:
    provider_config config_;
    std::string scheme_host_port_;
    std::string path_;
};

}  // namespace lcds::gateway
