#include "csakit/hashing.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <vector>

#include "csakit/corpus.hpp"
#include "csakit/errors.hpp"

namespace csakit {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(2 * n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = kDigits[data[i] >> 4];
        out[2 * i + 1] = kDigits[data[i] & 0xF];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("internal", "sha256 failed");
    }
    return to_hex(md.data(), len);
}

std::string hmac_sha256_hex(std::string_view key, std::string_view message) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(message.data()), message.size(), md.data(),
             &len) == nullptr) {
        throw Error("internal", "hmac failed");
    }
    return to_hex(md.data(), len);
}

std::string hash_author(std::string_view salt, std::string_view author) {
    return hmac_sha256_hex(salt, author).substr(0, 32);
}

std::string fingerprint_path(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw InputNotFound(path.string() + " does not exist");
    if (!fs::is_directory(path)) return sha256_hex(read_text_file(path));
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::string combined;
    for (const auto& f : files) {
        combined += fs::relative(f, path).generic_string();
        combined += '\0';
        combined += sha256_hex(read_text_file(f));
        combined += '\n';
    }
    return sha256_hex(combined);
}

std::string hex_decode(std::string_view hex) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParameterError("salt is not valid hex: " + std::string(hex));
    };
    if (hex.size() % 2 != 0) throw ParameterError("hex string has odd length");
    std::string out(hex.size() / 2, '\0');
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<char>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
    }
    return out;
}

}  // namespace csakit
