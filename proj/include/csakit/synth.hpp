#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "csakit/corpus.hpp"
#include "json.hpp"

namespace csakit {

struct SynthCell {
    BackgroundTag background = BackgroundTag::WithCsa;
    LabelSet labels;                   // nonempty
    std::vector<std::string> markers;  // vocabulary private to this cell

    std::string name() const;  // e.g. "with_csa/DA"
};

struct SynthSpec {
    int posts_per_cell = 80;
    std::vector<SynthCell> cells;
    std::vector<std::string> filler;
    int min_filler = 8;
    int max_filler = 20;
    int min_markers = 3;
    int max_markers = 6;
    std::uint64_t seed = 0;

    // Throws SpecError on overlapping vocabularies or bad ranges.
    void validate() const;
    nlohmann::json to_json() const;
};

// Both backgrounds crossed with all seven nonempty label sets, each cell with
// its own pseudo-word markers.
SynthSpec default_synth_spec(int posts_per_cell = 80, std::uint64_t seed = 0);
SynthSpec spec_from_json(const nlohmann::json& j);
SynthSpec load_synth_spec(const std::filesystem::path& path);

// Markers of a cell split round-robin over its labels (sorted label order).
std::vector<std::pair<ConditionLabel, std::string>> marker_assignment(const SynthCell& cell);

struct SynthCorpora {
    Corpus with_csa;
    Corpus without_csa;
};

// Each post: filler words plus at least min_markers markers of its cell,
// including at least one marker assigned to every label of the cell.
SynthCorpora generate(const SynthSpec& spec);

// Lexicon whose condition phrases are the cell markers by assignment, so
// keyword matching recovers every generated post's labels.
KeywordLexicon lexicon_from_spec(const SynthSpec& spec);

// Two disjoint vocabularies, docs_per_vocab documents drawn from each.
struct TopicFixture {
    Corpus corpus;
    std::vector<std::string> vocab_a;
    std::vector<std::string> vocab_b;
    std::vector<int> source;  // 0 or 1 per post
};
TopicFixture two_vocabulary_corpus(int docs_per_vocab, std::uint64_t seed, int words_per_doc = 30);

// Deterministic pseudo-word, distinct for distinct indices.
std::string pseudo_word(std::size_t index);

}  // namespace csakit
