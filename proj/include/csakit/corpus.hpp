#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace csakit {

// Order matters: D/A/P is the column order of every stage-2 probability vector.
enum class ConditionLabel { Depression, Anxiety, Ptsd };

inline constexpr std::array<ConditionLabel, 3> kAllConditions = {
    ConditionLabel::Depression, ConditionLabel::Anxiety, ConditionLabel::Ptsd};

using LabelSet = std::set<ConditionLabel>;

enum class BackgroundTag { WithCsa, WithoutCsa };

enum class PostFlag { Deleted, Removed, Throwaway };

using FlagSet = std::set<PostFlag>;

std::string_view to_string(ConditionLabel label);
std::string_view to_string(BackgroundTag tag);
std::string_view to_string(PostFlag flag);
std::optional<ConditionLabel> parse_condition(std::string_view text);
std::optional<BackgroundTag> parse_background(std::string_view text);
std::optional<PostFlag> parse_flag(std::string_view text);

// Short code used in figure labels and synthetic cell names, e.g. "DA", "DAP".
std::string label_code(const LabelSet& labels);

struct Post {
    std::string id;
    std::string author_hash;
    std::string subreddit;
    std::string title;
    std::string body;
    std::int64_t created_utc = 0;
    FlagSet flags;

    // The text every downstream consumer sees: title, newline, body.
    std::string canonical_text() const;

    bool operator==(const Post&) const = default;
};

struct Corpus {
    std::vector<Post> posts;
    BackgroundTag background = BackgroundTag::WithCsa;
    std::map<std::string, LabelSet> labels;

    // Empty set when the post carries no labels.
    const LabelSet& labels_of(const std::string& post_id) const;

    bool operator==(const Corpus&) const = default;
};

struct KeywordLexicon {
    std::string name;
    std::map<ConditionLabel, std::set<std::string>> entries;
    std::set<std::string> background_markers;
    // Phrase groups for conditions outside the three tracked labels
    // (schizophrenia, eating disorders, ...). Only used for per-group counts.
    std::map<std::string, std::set<std::string>> auxiliary;
};

struct Violation {
    std::string post_id;
    std::string rule;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

// Reports every broken corpus invariant; never throws.
std::vector<Violation> validate_corpus(const Corpus& corpus);

// Empty when the lexicon is usable: lowercase nonempty phrases, no phrase
// shared between two conditions.
std::vector<std::string> validate_lexicon(const KeywordLexicon& lexicon);

// The keyword lists used to collect and label posts with a CSA background.
KeywordLexicon default_lexicon();

nlohmann::json lexicon_to_json(const KeywordLexicon& lexicon);
KeywordLexicon lexicon_from_json(const nlohmann::json& j);
KeywordLexicon load_lexicon(const std::filesystem::path& path);

nlohmann::json post_to_json(const Post& post, const LabelSet& labels);
Post post_from_json(const nlohmann::json& j, LabelSet* labels = nullptr);

// A corpus directory holds posts.jsonl plus a corpus_manifest.json sidecar.
inline constexpr std::string_view kPostsFile = "posts.jsonl";
inline constexpr std::string_view kCorpusManifestFile = "corpus_manifest.json";

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus read_corpus(const std::filesystem::path& dir);

// Serialises JSON the same way everywhere so artifacts are byte-stable.
std::string dump_json(const nlohmann::json& j, int indent = -1);
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace csakit
