#include "lcds/core/io.hpp"

#include "lcds/core/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace lcds::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_code::io_failure, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const std::function<void()>& before_rename) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (f == nullptr) throw error(error_code::io_failure, "cannot write " + tmp.string());
    const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size() &&
                    std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
        std::filesystem::remove(tmp);
        throw error(error_code::io_failure, "short write to " + tmp.string());
    }
    if (before_rename) {
        try {
            before_rename();
        } catch (...) {
            std::filesystem::remove(tmp);
            throw;
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace lcds::io
