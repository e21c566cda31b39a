#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "csakit/cli.hpp"
#include "csakit/corpus.hpp"
#include "json.hpp"

namespace testkit {

namespace fs = std::filesystem;

// Fresh scratch directory, removed when the object goes away.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("csakit-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = csakit::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

inline void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& records) {
    std::string text;
    for (const auto& r : records) text += r.dump() + "\n";
    csakit::write_text_file(path, text);
}

struct CommunityCount {
    const char* subreddit;
    int in;
    int out;
};

// Posts collected per community and the count left after cleaning.
inline const std::vector<CommunityCount>& community_counts() {
    static const std::vector<CommunityCount> rows = {{"adultsurvivors", 6619, 6447}, {"depression", 455, 419},
                                                {"Anxiety", 18, 16},           {"ptsd", 738, 714},
                                                {"depression_help", 37, 37},   {"mentalhealth", 329, 324}};
    return rows;
}

// Archive records reproducing those counts: in - out records per community
// carry a deleted or removed body, the rest mention CSA and a condition.
inline std::vector<nlohmann::json> community_archive() {
    std::vector<nlohmann::json> records;
    int serial = 0;
    for (const auto& row : community_counts()) {
        for (int i = 0; i < row.in; ++i) {
            const int dropped = row.in - row.out;
            std::string body = "as a csa survivor my depression and trauma came back this week";
            if (i < dropped) body = i % 2 == 0 ? "[deleted]" : "[removed]";
            records.push_back({{"id", "t1_" + std::to_string(serial)},
                               {"author", "user" + std::to_string(serial % 5000)},
                               {"subreddit", row.subreddit},
                               {"title", "post " + std::to_string(i)},
                               {"selftext", body},
                               {"created_utc", 1500000000 + serial}});
            ++serial;
        }
    }
    return records;
}

}  // namespace testkit
