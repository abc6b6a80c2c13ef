// Shared helpers for the lcds test executables.
#pragma once

#include "lcds/core/error.hpp"
#include "lcds/core/io.hpp"
#include "lcds/gateway/completion.hpp"
#include "lcds/ingest/record.hpp"

#include <cstdint>
#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lcds::test {

inline std::filesystem::path fixtures() { return LCDS_FIXTURES; }
inline std::filesystem::path config_dir() { return LCDS_CONFIG; }
inline std::filesystem::path breast_dir() { return config_dir() / "departments" / "breast_surgery"; }

inline ingest::unified_record load_record(const std::filesystem::path& p) {
    return ingest::parse_record(io::read_file(p));
}

inline ingest::unified_record corpus_record(const std::string& case_id) {
    return load_record(fixtures() / "corpus" / "breast_surgery" / case_id / "record.json");
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto p = std::filesystem::temp_directory_path() / ("lcds-" + tag + "-" + std::to_string(rng()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Code of the lcds::error thrown by f; empty when nothing (or something else) is thrown.
inline std::optional<error_code> code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    } catch (...) {
    }
    return std::nullopt;
}

/// Random pick from a vector.
template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Provider whose replies come from a callback.
class scripted_provider : public gateway::completion_provider {
public:
    using script = std::function<std::string(const gateway::completion_request&)>;

    explicit scripted_provider(script s, bool semantic = true) : script_(std::move(s)), semantic_(semantic) {}

    [[nodiscard]] std::string id() const override { return "scripted"; }
    [[nodiscard]] bool semantic_capable() const override { return semantic_; }

    gateway::completion_response send(const gateway::completion_request& request, std::chrono::milliseconds) override {
        ++calls;
        gateway::completion_response r;
        r.text = script_(request);
        r.provider_id = id();
        return r;
    }

    std::atomic<int> calls{0};

private:
    script script_;
    bool semantic_;
};

inline gateway::completion_gateway scripted_gateway(scripted_provider::script s, bool semantic = true) {
    gateway::provider_config config;
    config.backoff_base_ms = 0;
    return gateway::completion_gateway(std::make_shared<scripted_provider>(std::move(s), semantic), config);
}

}  // namespace lcds::test
