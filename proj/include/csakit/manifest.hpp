#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace csakit {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestFile = "run_manifest.json";

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> inputs;  // role -> content fingerprint
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::string> outputs;
    std::optional<std::string> started_at;  // only when timestamps are requested
    std::optional<std::string> finished_at;

    void add_input(const std::string& role, const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& dir) const;
};

std::string utc_timestamp();

}  // namespace csakit
