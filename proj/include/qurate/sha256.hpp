#pragma once

#include <string>
#include <string_view>

namespace qurate {

// Hex digest of the SHA-256 of a byte string. Used for run manifests.
std::string sha256_hex(std::string_view data);

// Hex digest of a file's contents. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace qurate
