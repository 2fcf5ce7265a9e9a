#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gradekit {

// Writes `data` to a temporary file in the destination's directory, flushes
// it, and renames it over `path`. Readers see either the old or the new
// content, never a mix. Parent directories are created as needed.
void write_file_atomically(const std::filesystem::path& path, std::string_view data);

std::string read_file(const std::filesystem::path& path);

} // namespace gradekit
