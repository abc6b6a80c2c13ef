/**
 * @file io.hpp
 * @brief File helpers used by the CLI, the service and the loaders
 */

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace lcds::io {

/// Reads a whole file as bytes. Throws lcds::error(io_failure).
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/**
 * @brief Writes to a sibling temp file, flushes, then renames over the target
 *
 * before_rename runs once the temp file is durable; if it throws, the temp
 * file is removed and the target is left untouched.
 */
void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const std::function<void()>& before_rename = {});

}  // namespace lcds::io
