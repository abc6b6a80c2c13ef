#include "lcds/gateway/prompt_format.hpp"

#include "lcds/ingest/record.hpp"

namespace lcds::gateway::prompt {

std::string heading(std::string_view name) {
    return "### " + std::string(name) + "\n";
}

std::string sentence_line(std::string_view sid, std::string_view text) {
    return "[" + std::string(sid) + "] " + std::string(text) + "\n";
}

std::optional<std::pair<std::string, std::string>> parse_sentence_line(std::string_view line) {
    if (!line.starts_with('[')) return std::nullopt;
    const auto close = line.find("] ");
    if (close == std::string_view::npos) return std::nullopt;
    auto sid = std::string(line.substr(1, close - 1));
    if (!ingest::sentence_id::parse(sid)) return std::nullopt;
    return std::pair{std::move(sid), std::string(line.substr(close + 2))};
}

std::vector<std::string> section_lines(std::string_view prompt, std::string_view name) {
    std::vector<std::string> out;
    const auto marker = heading(name);
    bool inside = false;
    std::size_t pos = 0;
    while (pos <= prompt.size()) {
        const auto nl = prompt.find('\n', pos);
        const auto line = prompt.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (line.starts_with("### ")) {
            inside = std::string(line) + "\n" == marker;
        } else if (inside) {
            out.emplace_back(line);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

}  // namespace lcds::gateway::prompt
