#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "csakit/corpus.hpp"
#include "csakit/text.hpp"

namespace csakit {

struct TokenizedCorpus {
    std::vector<std::vector<std::string>> docs;  // n-gram terms per document
    std::map<std::string, std::size_t> vocab;    // corpus frequency per term
    int n = 1;

    // Builds vocab by recounting docs.
    static TokenizedCorpus from_docs(std::vector<std::vector<std::string>> docs, int n = 1);
    std::size_t total_terms() const;
};

// Normalised n-grams (n in {1, 2}) formed within sentence boundaries, one doc
// per post's canonical text.
TokenizedCorpus tokenize(const Corpus& corpus, int n, const NormalizeOptions& opts = {});
TokenizedCorpus tokenize_texts(std::span<const std::string> texts, int n,
                               const NormalizeOptions& opts = {});

enum class ScoreMethod { LogOdds, ProportionShift, Tfidf, CTfidf };
std::string_view to_string(ScoreMethod method);

struct TermScore {
    std::string term;
    double score = 0.0;

    bool operator==(const TermScore&) const = default;
};

// Rows sorted by descending score, ties by ascending term.
struct TermScoreTable {
    std::vector<TermScore> rows;
    ScoreMethod method = ScoreMethod::LogOdds;
    std::map<std::string, std::string> metadata;

    void sort_rows();
    TermScoreTable top(std::size_t k) const;
    const TermScore* find(const std::string& term) const;
};

struct LogOddsOptions {
    double alpha_scale = 1.0;
    std::size_t min_count = 2;  // on target+contrast frequency
    bool z_score = true;        // false: plain smoothed log-odds difference
};

// Log-odds ratio with an informative Dirichlet prior; alpha_w is the prior
// corpus frequency of w times alpha_scale.
TermScoreTable log_odds(const TokenizedCorpus& target, const TokenizedCorpus& contrast,
                        const TokenizedCorpus& prior, const LogOddsOptions& opts = {});
// Same statistic with alpha_w = alpha_scale for every term of target+contrast.
TermScoreTable log_odds_uniform(const TokenizedCorpus& target, const TokenizedCorpus& contrast,
                                const LogOddsOptions& opts = {});
// Default prior: the union of both corpora.
TokenizedCorpus merge_corpora(const TokenizedCorpus& a, const TokenizedCorpus& b);

// Difference of relative frequencies, target minus contrast.
TermScoreTable proportion_shift(const TokenizedCorpus& target, const TokenizedCorpus& contrast);

struct ShiftSides {
    std::vector<TermScore> positive;  // most target-leaning first
    std::vector<TermScore> negative;  // most contrast-leaning first
};
ShiftSides shift_sides(const TermScoreTable& shift, std::size_t k);

enum class TfidfAggregation { Max, Sum };

// tf = raw count in a doc, idf = ln((1+N)/(1+df)) + 1, aggregated across docs.
TermScoreTable tfidf_ngrams(const TokenizedCorpus& tc, std::size_t top_k,
                            TfidfAggregation aggregation = TfidfAggregation::Max);

// Class-based TF-IDF: tf_{t,c} * ln(1 + A / f_t), A = mean token count per class.
std::map<std::string, TermScoreTable> c_tfidf(const std::map<std::string, TokenizedCorpus>& classes);

// CSV with columns term,score,method,params.
std::string table_to_csv(const TermScoreTable& table);
std::string format_double(double value);

}  // namespace csakit
