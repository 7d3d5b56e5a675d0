#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace seoe {

using json = nlohmann::json;

// Canonical form: object keys sorted (nlohmann's default map ordering), no
// insignificant whitespace, UTF-8 bytes unescaped.
std::string canonical_dump(const json& value);

json parse_json(std::string_view text, const std::string& context);

std::string read_file(const std::filesystem::path& path);

// Creates parent directories, writes to a temp sibling, then renames into
// place so readers never observe partial content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace seoe
