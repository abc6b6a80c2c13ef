#include "lcds/gateway/mock_provider.hpp"

#include "lcds/core/text.hpp"
#include "lcds/gateway/prompt_format.hpp"
#include "lcds/segmentation/sentence_splitter.hpp"

#include <thread>

namespace lcds::gateway {

std::string echo_sources(std::string_view prompt_text) {
    std::vector<std::string> sentences;
    for (const auto& line : prompt::section_lines(prompt_text, prompt::source_content)) {
        if (auto parsed = prompt::parse_sentence_line(line)) sentences.push_back(std::move(parsed->second));
    }
    return segmentation::join_sentences(sentences);
}

void mock_provider::add_canned(std::string prompt_substring, std::string reply) {
    std::lock_guard lock(mutex_);
    canned_.emplace_back(std::move(prompt_substring), std::move(reply));
}

std::string mock_provider::reply_for(const completion_request& request) const {
    {
        std::lock_guard lock(mutex_);
        for (const auto& [key, reply] : canned_) {
            if (request.prompt.find(key) != std::string::npos) return reply;
        }
    }

    if (request.structured == structured_shape::identifier_list) {
        std::string target;
        for (const auto& line : prompt::section_lines(request.prompt, prompt::generated_sentence)) {
            target += line;
        }
        std::string out = "[";
        for (const auto& line : prompt::section_lines(request.prompt, prompt::candidates)) {
            auto parsed = prompt::parse_sentence_line(line);
            if (!parsed || !text::equal_ignoring_whitespace(parsed->second, target)) continue;
            if (out.size() > 1) out += ", ";
            out += parsed->first;
        }
        return out + "]";
    }
    if (request.structured == structured_shape::judge_breakdown) {
        return "{\n  \"score\" 100,\n  \"breakdown\" {\n    \"Information Accuracy\" 40/40,\n"
               "    \"Medical Completeness\" 35/35,\n    \"Professional Standardization\" 15/15,\n"
               "    \"Clinical Practicality\" 10/10\n  }\n}";
    }
    if (request.structured == structured_shape::label_segment_map) return "{}";

    if (!prompt::section_lines(request.prompt, prompt::source_content).empty()) {
        return echo_sources(request.prompt);
    }
    return "mock completion";
}

completion_response mock_provider::send(const completion_request& request, std::chrono::milliseconds) {
    ++calls_;
    const int now = ++in_flight_;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    struct leave {
        std::atomic<int>& counter;
        ~leave() { --counter; }
    } guard{in_flight_};

    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    completion_response response;
    response.text = reply_for(request);
    response.provider_id = id();
    response.latency_ms = static_cast<double>(latency_.count());
    response.prompt_tokens = static_cast<int>(request.prompt.size() / 4);
    response.completion_tokens = static_cast<int>(response.text.size() / 4);
    return response;
}

}  // namespace lcds::gateway
