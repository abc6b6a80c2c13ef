/**
 * @file mock_provider.hpp
 * @brief Deterministic offline provider
 *
 * The mock behaves like an obedient copy-editor: generation prompts get the
 * listed source sentences back verbatim, attribution prompts get the
 * identifiers of candidates whose text equals the generated sentence, and
 * judge prompts get full marks. It reports itself as not semantic-capable,
 * so segmentation and task parsing use their lexicon fallbacks.
 */

#pragma once

#include "lcds/gateway/completion.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace lcds::gateway {

class mock_provider : public completion_provider {
public:
    mock_provider() = default;
    explicit mock_provider(std::chrono::milliseconds latency) : latency_(latency) {}

    [[nodiscard]] std::string id() const override { return "mock"; }
    [[nodiscard]] bool semantic_capable() const override { return false; }

    completion_response send(const completion_request& request, std::chrono::milliseconds timeout) override;

    /// First canned reply whose key occurs in the prompt wins over the built-in rules.
    void add_canned(std::string prompt_substring, std::string reply);

    [[nodiscard]] int calls() const noexcept { return calls_.load(); }
    [[nodiscard]] int max_in_flight_observed() const noexcept { return max_in_flight_.load(); }

private:
    [[nodiscard]] std::string reply_for(const completion_request& request) const;

    std::chrono::milliseconds latency_{0};
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, std::string>> canned_;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

/// Reply the mock gives to a generation prompt: its source sentences, joined.
[[nodiscard]] std::string echo_sources(std::string_view prompt);

}  // namespace lcds::gateway
