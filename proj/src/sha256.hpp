#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace seoe {

// Lowercase 64-hex-character SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace seoe
