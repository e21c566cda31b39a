#include "csakit/manifest.hpp"

#include <chrono>
#include <ctime>

#include "csakit/corpus.hpp"
#include "csakit/hashing.hpp"

namespace csakit {

using nlohmann::json;

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    inputs[role] = fingerprint_path(path);
}

json RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["config"] = config;
    j["inputs"] = inputs;
    j["seeds"] = seeds;
    j["outputs"] = outputs;
    j["tool_version"] = std::string(kToolVersion);
    j["started_at"] = started_at ? json(*started_at) : json(nullptr);
    j["finished_at"] = finished_at ? json(*finished_at) : json(nullptr);
    return j;
}

void RunManifest::write(const std::filesystem::path& dir) const {
    write_text_file(dir / kManifestFile, dump_json(to_json(), 2) + "\n");
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace csakit
