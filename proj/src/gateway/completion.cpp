#include "lcds/gateway/completion.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace lcds::gateway {

namespace {

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        return fallback;
    }
}

std::string env_string(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return (v == nullptr || *v == '\0') ? fallback : std::string(v);
}

}  // namespace

provider_config provider_config::from_env() {
    provider_config c;
    c.endpoint = env_string("LCDS_ENDPOINT", "http://127.0.0.1:8000/v1/chat/completions");
    c.model = env_string("LCDS_MODEL", "default");
    c.auth_token_env = env_string("LCDS_AUTH_ENV", c.auth_token_env);
    c.timeout_ms = env_int("LCDS_TIMEOUT_MS", c.timeout_ms);
    c.max_retries = env_int("LCDS_MAX_RETRIES", c.max_retries);
    c.max_in_flight = env_int("LCDS_MAX_IN_FLIGHT", c.max_in_flight);
    return c;
}

void provider_config::validate() const {
    if (timeout_ms <= 0) throw error(error_code::invalid_argument, "provider timeout must be positive");
    if (max_retries < 0) throw error(error_code::invalid_argument, "provider retries must be non-negative");
    if (max_in_flight <= 0) throw error(error_code::invalid_argument, "max in-flight must be positive");
    if (backoff_base_ms < 0) throw error(error_code::invalid_argument, "backoff must be non-negative");
}

completion_gateway::completion_gateway(std::shared_ptr<completion_provider> provider, provider_config config)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      limiter_(std::make_shared<in_flight_limiter>()),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (!provider_) throw error(error_code::invalid_argument, "completion_gateway needs a provider");
    config_.validate();
}

completion_response completion_gateway::complete(completion_request request) const {
    if (request.prompt.empty()) throw error(error_code::invalid_argument, "completion prompt is empty");
    if (request.max_tokens <= 0) throw error(error_code::invalid_argument, "max_tokens must be positive");
    if (request.temperature < 0) throw error(error_code::invalid_argument, "temperature must be >= 0");
    if (config_.pin_temperature_zero) request.temperature = 0.0;

    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    std::string last_failure;
    error_code last_code = error_code::provider_error;

    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            sleep_(std::chrono::milliseconds(static_cast<long long>(config_.backoff_base_ms) << (attempt - 1)));
        }
        {
            std::unique_lock lock(limiter_->mutex);
            limiter_->cv.wait(lock, [&] { return limiter_->active < config_.max_in_flight; });
            ++limiter_->active;
        }
        struct release_slot {
            in_flight_limiter& l;
            ~release_slot() {
                {
                    std::lock_guard lock(l.mutex);
                    --l.active;
                }
                l.cv.notify_one();
            }
        } slot{*limiter_};

        try {
            const auto started = std::chrono::steady_clock::now();
            auto response = provider_->send(request, timeout);
            const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - started;
            if (response.latency_ms <= 0.0) response.latency_ms = elapsed.count();
            if (response.provider_id.empty()) response.provider_id = provider_->id();
            return response;
        } catch (const provider_failure& f) {
            last_failure = f.what();
            switch (f.failure_kind()) {
                case provider_failure::kind::permanent:
                    throw error(error_code::provider_error,
                                "ProviderError(" + std::to_string(f.status()) + "): " + f.what());
                case provider_failure::kind::timeout:
                    last_code = error_code::timeout;
                    break;
                case provider_failure::kind::transient:
                    last_code = error_code::provider_error;
                    break;
            }
        }
    }

    if (config_.max_retries == 0) throw error(last_code, last_failure);
    throw error(error_code::retries_exhausted, "RetriesExhausted after " + std::to_string(config_.max_retries + 1) +
                                                   " attempts: " + last_failure);
}

std::string repair_instruction(structured_shape shape) {
    std::string out =
        "\n\nYour previous reply could not be parsed. Reply again with only the required output and no other text. ";
    switch (shape) {
        case structured_shape::identifier_list:
            out += "Format: [id1, id2, ...] using only identifiers listed above, or [] if none apply.";
            break;
        case structured_shape::label_segment_map:
            out += "Format: a JSON object mapping each label to text copied exactly from the input.";
            break;
        case structured_shape::judge_breakdown:
            out += "Format: the score object exactly as specified, with all four breakdown dimensions.";
            break;
    }
    return out;
}

structured_value completion_gateway::complete_structured(completion_request request) const {
    if (!request.structured) {
        throw error(error_code::invalid_argument, "complete_structured needs a structured shape tag");
    }
    const auto shape = *request.structured;
    auto try_parse = [shape](const std::string& reply) -> std::optional<structured_value> {
        switch (shape) {
            case structured_shape::identifier_list:
                if (auto v = parse_identifier_list(reply)) return structured_value{std::move(*v)};
                break;
            case structured_shape::label_segment_map:
                if (auto v = parse_label_segment_map(reply)) return structured_value{std::move(*v)};
                break;
            case structured_shape::judge_breakdown:
                if (auto v = parse_judge_output(reply)) return structured_value{*v};
                break;
        }
        return std::nullopt;
    };

    if (auto parsed = try_parse(complete(request).text)) return std::move(*parsed);
    request.prompt += repair_instruction(shape);
    if (auto parsed = try_parse(complete(request).text)) return std::move(*parsed);
    throw error(error_code::malformed_structured_output,
                "MalformedStructuredOutput: reply did not match " + std::string(to_string(shape)));
}

std::vector<std::string> completion_gateway::complete_identifiers(completion_request request) const {
    request.structured = structured_shape::identifier_list;
    return std::get<std::vector<std::string>>(complete_structured(std::move(request)));
}

label_segments completion_gateway::complete_segments(completion_request request) const {
    request.structured = structured_shape::label_segment_map;
    return std::get<label_segments>(complete_structured(std::move(request)));
}

judge_output completion_gateway::complete_judge(completion_request request) const {
    request.structured = structured_shape::judge_breakdown;
    return std::get<judge_output>(complete_structured(std::move(request)));
}

}  // namespace lcds::gateway
