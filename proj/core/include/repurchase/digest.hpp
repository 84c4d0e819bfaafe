#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace repurchase {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Hash of the file's bytes; throws when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace repurchase
