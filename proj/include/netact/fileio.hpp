#pragma once

#include <filesystem>
#include <string>

namespace netact {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace netact
