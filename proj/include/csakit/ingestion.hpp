#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csakit/corpus.hpp"
#include "json.hpp"

namespace csakit {

// One raw archive line (PushShift submission dump). Expected keys:
// id, author, subreddit, title, selftext, created_utc.
using ArchiveRecord = nlohmann::json;

struct ArchiveReadResult {
    std::vector<ArchiveRecord> records;
    std::size_t skipped = 0;  // malformed lines
};

// Streams records in file order; malformed lines (bad JSON, not an object, or
// no id) are skipped and counted. Returns the skip count.
std::size_t for_each_archive_record(const std::filesystem::path& path,
                                    const std::function<void(ArchiveRecord&&)>& sink);
ArchiveReadResult read_archive(const std::filesystem::path& path);

struct SubredditCounts {
    std::size_t in = 0;
    std::size_t out = 0;
};

struct CleanReport {
    std::map<std::string, SubredditCounts> per_subreddit;
    std::size_t dropped_deleted = 0;
    std::size_t dropped_removed = 0;
};

// Drops "[deleted]"/"[removed]" submissions, pseudonymises authors with the
// run salt, flags throwaway accounts and scrubs the raw author name from text.
std::vector<Post> clean(std::span<const ArchiveRecord> records, std::string_view salt,
                        CleanReport* report = nullptr);

LabelSet match_keywords(const Post& post, const KeywordLexicon& lexicon);
LabelSet match_keywords_text(std::string_view canonical_text, const KeywordLexicon& lexicon);
bool has_background_marker(const Post& post, const KeywordLexicon& lexicon);
bool matches_any(std::string_view canonical_text, const std::set<std::string>& phrases);

enum class TraitMode {
    PerKeyword,         // labels from keyword matches; posts with none are dropped
    Fixed,              // every post gets fixed_label
    MentalHealthGeneric // labels from keyword matches; an empty set is kept
};

struct CollectionRule {
    std::string source_subreddit;
    std::set<std::string> include_phrases;
    bool require_background_marker = false;
    TraitMode trait = TraitMode::PerKeyword;
    std::optional<ConditionLabel> fixed_label;
};

// Rules mirroring the six source communities (adultsurvivors, depression,
// Anxiety, ptsd, depression_help, mentalhealth).
std::vector<CollectionRule> default_rules(const KeywordLexicon& lexicon);

// Rule files name phrase sets symbolically ("conditions", "background_markers",
// "auxiliary") or list phrases directly.
std::vector<CollectionRule> rules_from_json(const nlohmann::json& j, const KeywordLexicon& lexicon);
std::vector<CollectionRule> load_rules(const std::filesystem::path& path,
                                       const KeywordLexicon& lexicon);
nlohmann::json rules_to_json(const std::vector<CollectionRule>& rules);

struct CollectReport {
    CleanReport clean;
    std::map<std::string, std::size_t> collected_per_subreddit;
    std::map<std::string, std::size_t> ignored_subreddits;  // no rule applies
    std::map<std::string, std::size_t> condition_counts;    // incl. auxiliary groups
    std::size_t duplicate_ids = 0;
};

Corpus collect(std::span<const ArchiveRecord> records, std::span<const CollectionRule> rules,
               const KeywordLexicon& lexicon, std::string_view salt,
               CollectReport* report = nullptr);

// Negative cohort from an annotated dataset: records carry "labels" (array) or
// "label" (string); when neither is present the subreddit name is used.
Corpus build_negative_corpus(std::span<const ArchiveRecord> records,
                             const KeywordLexicon& lexicon, std::string_view salt,
                             CleanReport* report = nullptr);

// Deterministic sample of k posts for manual review.
std::vector<Post> audit_sample(const Corpus& corpus, std::size_t k, std::uint64_t seed);

}  // namespace csakit
