/**
 * @file prompt_format.hpp
 * @brief Section headings and identified-sentence lines shared by all prompts
 *
 * Prompts are plain text split into "### <Heading>" sections. Source
 * sentences appear one per line as "[<sid>] <text>" so a model can answer
 * with identifiers alone.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcds::gateway::prompt {

inline constexpr std::string_view role = "Role";
inline constexpr std::string_view source_content = "Source Content";
inline constexpr std::string_view knowledge_base = "Knowledge Base";
inline constexpr std::string_view output_format = "Output Format";
inline constexpr std::string_view candidates = "Candidate Sentences";
inline constexpr std::string_view generated_sentence = "Generated Sentence";
inline constexpr std::string_view input_text = "Input Text";

[[nodiscard]] std::string heading(std::string_view name);

[[nodiscard]] std::string sentence_line(std::string_view sid, std::string_view text);

/// (sid, text) when the line has the "[sid] text" form.
[[nodiscard]] std::optional<std::pair<std::string, std::string>> parse_sentence_line(std::string_view line);

/// Lines between "### name" and the next heading, without the heading itself.
[[nodiscard]] std::vector<std::string> section_lines(std::string_view prompt, std::string_view name);

}  // namespace lcds::gateway::prompt
