/**
 * @file recording.hpp
 * @brief Record provider exchanges to a file and replay them offline
 *
 * Recording format: JSON Lines, UTF-8. The first line is a header
 *
 *     {"lcds_recording":1,"provider":"<id>","semantic_capable":<bool>}
 *
 * and each following line is one exchange
 *
 *     {"prompt":"...","structured":null|"identifier-list"|...,"text":"..."}
 *
 * Replay answers a request with the text of the first exchange whose prompt
 * and structured tag match exactly.
 */

#pragma once

#include "lcds/gateway/completion.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

namespace lcds::gateway {

class recording_provider : public completion_provider {
public:
    recording_provider(std::shared_ptr<completion_provider> inner, std::filesystem::path path);

    [[nodiscard]] std::string id() const override { return inner_->id(); }
    [[nodiscard]] bool semantic_capable() const override { return inner_->semantic_capable(); }

    completion_response send(const completion_request& request, std::chrono::milliseconds timeout) override;

private:
    std::shared_ptr<completion_provider> inner_;
    std::filesystem::path path_;
    std::mutex mutex_;
};

class replay_provider : public completion_provider {
public:
    explicit replay_provider(const std::filesystem::path& path);

    [[nodiscard]] std::string id() const override { return "replay:" + recorded_id_; }
    [[nodiscard]] bool semantic_capable() const override { return semantic_capable_; }

    /// Unknown prompts raise a permanent provider_failure (status 404).
    completion_response send(const completion_request& request, std::chrono::milliseconds timeout) override;

    [[nodiscard]] std::size_t size() const noexcept { return exchanges_.size(); }

private:
    std::string recorded_id_;
    bool semantic_capable_ = true;
    std::map<std::pair<std::string, std::string>, std::string> exchanges_;
};

}  // namespace lcds::gateway
