#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fcp {

// Writes to a temporary sibling and renames it into place, so readers see
// either the old file or the complete new one.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Throws NotFound if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace fcp
