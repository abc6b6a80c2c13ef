/**
 * @file completion.hpp
 * @brief Provider-neutral completion gateway
 *
 * Every model call in the pipeline goes through completion_gateway. The
 * gateway owns retry with exponential backoff, the in-flight bound, the
 * temperature pin and structured-output parsing; providers only move bytes.
 */

#pragma once

#include "lcds/core/error.hpp"
#include "lcds/gateway/structured.hpp"

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lcds::gateway {

struct completion_request {
    std::string prompt;
    int max_tokens = 1024;
    double temperature = 0.0;
    std::optional<structured_shape> structured;
    std::string request_id;
};

struct completion_response {
    std::string text;
    std::string provider_id;
    double latency_ms = 0.0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct provider_config {
    std::string endpoint;
    std::string model;
    /// Name of the environment variable that holds the bearer token.
    std::string auth_token_env = "LCDS_API_KEY";
    int timeout_ms = 60000;
    int max_retries = 3;
    int max_in_flight = 4;
    int backoff_base_ms = 250;
    /// Pipeline calls always run at temperature 0 unless this is cleared.
    bool pin_temperature_zero = true;

    /// Reads LCDS_ENDPOINT, LCDS_MODEL, LCDS_TIMEOUT_MS, LCDS_MAX_RETRIES.
    [[nodiscard]] static provider_config from_env();
    /// @throws lcds::error(invalid_argument)
    void validate() const;
};

/**
 * @brief Transport-level failure reported by a provider
 *
 * Transient failures (timeouts, 429, 5xx, refused connections) are retried
 * by the gateway; permanent ones surface immediately as ProviderError.
 */
class provider_failure : public std::runtime_error {
public:
    enum class kind { timeout, transient, permanent };

    provider_failure(kind k, int status, const std::string& message)
        : std::runtime_error(message), kind_(k), status_(status) {}

    [[nodiscard]] kind failure_kind() const noexcept { return kind_; }
    [[nodiscard]] int status() const noexcept { return status_; }

private:
    kind kind_;
    int status_;
};

class completion_provider {
public:
    virtual ~completion_provider() = default;

    [[nodiscard]] virtual std::string id() const = 0;

    /// False for offline stand-ins; stages then use their deterministic fallbacks.
    [[nodiscard]] virtual bool semantic_capable() const { return true; }

    /// Must be safe to call from several threads at once.
    virtual completion_response send(const completion_request& request,
                                     std::chrono::milliseconds timeout) = 0;
};

using structured_value = std::variant<std::vector<std::string>, label_segments, judge_output>;

class completion_gateway {
public:
    using sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit completion_gateway(std::shared_ptr<completion_provider> provider,
                                provider_config config = {});

    /**
     * @brief One completion with retry on transient failure
     *
     * @throws lcds::error timeout, provider_error or retries_exhausted
     */
    [[nodiscard]] completion_response complete(completion_request request) const;

    /**
     * @brief Completion parsed into the shape named by request.structured
     *
     * A reply that does not parse is retried once with a repair instruction
     * appended; a second failure raises malformed_structured_output.
     */
    [[nodiscard]] structured_value complete_structured(completion_request request) const;

    [[nodiscard]] std::vector<std::string> complete_identifiers(completion_request request) const;
    [[nodiscard]] label_segments complete_segments(completion_request request) const;
    [[nodiscard]] judge_output complete_judge(completion_request request) const;

    [[nodiscard]] bool semantic_capable() const { return provider_->semantic_capable(); }
    [[nodiscard]] std::string provider_id() const { return provider_->id(); }
    [[nodiscard]] const provider_config& config() const noexcept { return config_; }

    /// Replaces the backoff sleep; tests install a recorder.
    void set_sleeper(sleeper s) { sleep_ = std::move(s); }

private:
    struct in_flight_limiter {
        std::mutex mutex;
        std::condition_variable cv;
        int active = 0;
    };

    std::shared_ptr<completion_provider> provider_;
    provider_config config_;
    std::shared_ptr<in_flight_limiter> limiter_;
    sleeper sleep_;
};

/// Appended to a prompt whose structured reply failed to parse.
[[nodiscard]] std::string repair_instruction(structured_shape shape);

}  // namespace lcds::gateway
