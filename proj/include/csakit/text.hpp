#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace csakit {

// Versions of the shipped normalization resources; recorded in table metadata.
inline constexpr std::string_view kStopwordListVersion = "en-stop-v1";
inline constexpr std::string_view kLemmatizerVersion = "suffix-lemma-v1";

std::string to_lower_ascii(std::string_view text);

// Lowercase and collapse every whitespace run to a single space (trimmed).
std::string normalize_whitespace_lower(std::string_view text);

// Whole-phrase, word-boundary test on text already passed through
// normalize_whitespace_lower. Bytes >= 0x80 count as word characters.
bool contains_phrase(std::string_view normalized_text, std::string_view phrase);

struct NormalizeOptions {
    bool strip_urls = true;
    bool remove_stopwords = true;
    bool lemmatize = true;
};

const std::set<std::string>& stopwords();
std::string lemmatize(std::string_view word);

// Lowercased, URL/punctuation-stripped tokens grouped by sentence.
std::vector<std::vector<std::string>> sentence_tokens(std::string_view text,
                                                      const NormalizeOptions& opts = {});

// Word-level tokens without filtering (used by the neural encoder vocabulary).
std::vector<std::string> simple_tokens(std::string_view text);

}  // namespace csakit
