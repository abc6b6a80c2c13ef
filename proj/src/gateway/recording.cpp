#include "lcds/gateway/recording.hpp"

#include "lcds/core/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace lcds::gateway {

namespace {

std::string shape_tag(const completion_request& request) {
    return request.structured ? std::string(to_string(*request.structured)) : std::string();
}

}  // namespace

recording_provider::recording_provider(std::shared_ptr<completion_provider> inner, std::filesystem::path path)
    : inner_(std::move(inner)), path_(std::move(path)) {
    if (!inner_) throw error(error_code::invalid_argument, "recording_provider needs an inner provider");
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw error(error_code::io_failure, "cannot create recording " + path_.string());
    nlohmann::ordered_json header;
    header["lcds_recording"] = 1;
    header["provider"] = inner_->id();
    header["semantic_capable"] = inner_->semantic_capable();
    out << header.dump() << '\n';
}

completion_response recording_provider::send(const completion_request& request, std::chrono::milliseconds timeout) {
    auto response = inner_->send(request, timeout);
    nlohmann::ordered_json line;
    line["prompt"] = request.prompt;
    line["structured"] = request.structured ? nlohmann::ordered_json(shape_tag(request)) : nlohmann::ordered_json();
    line["text"] = response.text;

    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    return response;
}

replay_provider::replay_provider(const std::filesystem::path& path) {
    std::istringstream in(io::read_file(path));
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw error(error_code::parse_failure, "bad recording line in " + path.string());
        if (!header_seen) {
            if (!j.contains("lcds_recording")) throw error(error_code::parse_failure, "recording header missing");
            recorded_id_ = j.value("provider", "unknown");
            semantic_capable_ = j.value("semantic_capable", true);
            header_seen = true;
            continue;
        }
        const auto tag = j["structured"].is_null() ? std::string() : j["structured"].get<std::string>();
        exchanges_.try_emplace({j.at("prompt").get<std::string>(), tag}, j.at("text").get<std::string>());
    }
    if (!header_seen) throw error(error_code::parse_failure, "empty recording " + path.string());
}

completion_response replay_provider::send(const completion_request& request, std::chrono::milliseconds) {
    const auto it = exchanges_.find({request.prompt, shape_tag(request)});
    if (it == exchanges_.end()) {
        throw provider_failure(provider_failure::kind::permanent, 404, "no recorded exchange for this prompt");
    }
    completion_response response;
    response.text = it->second;
    response.provider_id = id();
    return response;
}

}  // namespace lcds::gateway
