#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace csakit {

std::string sha256_hex(std::string_view data);
std::string hmac_sha256_hex(std::string_view key, std::string_view message);

// Keyed author pseudonym. The salt is supplied per run and never written out.
std::string hash_author(std::string_view salt, std::string_view author);

// Content fingerprint of a file, or of every regular file under a directory
// (relative path + content, in sorted path order).
std::string fingerprint_path(const std::filesystem::path& path);

std::string hex_decode(std::string_view hex);

}  // namespace csakit
