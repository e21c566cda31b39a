#include "csakit/lexical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "csakit/errors.hpp"

namespace csakit {

TokenizedCorpus TokenizedCorpus::from_docs(std::vector<std::vector<std::string>> docs, int n) {
    TokenizedCorpus tc;
    tc.docs = std::move(docs);
    tc.n = n;
    for (const auto& doc : tc.docs) {
        for (const auto& term : doc) ++tc.vocab[term];
    }
    return tc;
}

std::size_t TokenizedCorpus::total_terms() const {
    std::size_t total = 0;
    for (const auto& [_, count] : vocab) total += count;
    return total;
}

TokenizedCorpus tokenize_texts(std::span<const std::string> texts, int n,
                               const NormalizeOptions& opts) {
    if (n != 1 && n != 2) throw ParameterError("n-gram order must be 1 or 2, got " + std::to_string(n));
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<std::string> doc;
        for (const auto& sentence : sentence_tokens(text, opts)) {
            if (n == 1) {
                doc.insert(doc.end(), sentence.begin(), sentence.end());
            } else {
                for (std::size_t i = 0; i + 1 < sentence.size(); ++i) {
                    doc.push_back(sentence[i] + " " + sentence[i + 1]);
                }
            }
        }
        docs.push_back(std::move(doc));
    }
    return TokenizedCorpus::from_docs(std::move(docs), n);
}

TokenizedCorpus tokenize(const Corpus& corpus, int n, const NormalizeOptions& opts) {
    std::vector<std::string> texts;
    texts.reserve(corpus.posts.size());
    for (const auto& post : corpus.posts) texts.push_back(post.canonical_text());
    return tokenize_texts(texts, n, opts);
}

std::string_view to_string(ScoreMethod method) {
    switch (method) {
        case ScoreMethod::LogOdds: return "log_odds";
        case ScoreMethod::ProportionShift: return "proportion_shift";
        case ScoreMethod::Tfidf: return "tfidf";
        case ScoreMethod::CTfidf: return "c_tfidf";
    }
    return "?";
}

void TermScoreTable::sort_rows() {
    std::sort(rows.begin(), rows.end(), [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
}

TermScoreTable TermScoreTable::top(std::size_t k) const {
    TermScoreTable out = *this;
    if (out.rows.size() > k) out.rows.resize(k);
    return out;
}

const TermScore* TermScoreTable::find(const std::string& term) const {
    for (const auto& row : rows) {
        if (row.term == term) return &row;
    }
    return nullptr;
}

TokenizedCorpus merge_corpora(const TokenizedCorpus& a, const TokenizedCorpus& b) {
    auto docs = a.docs;
    docs.insert(docs.end(), b.docs.begin(), b.docs.end());
    return TokenizedCorpus::from_docs(std::move(docs), a.n);
}

namespace {

std::size_t count_of(const TokenizedCorpus& tc, const std::string& term) {
    auto it = tc.vocab.find(term);
    return it == tc.vocab.end() ? 0 : it->second;
}

TermScoreTable log_odds_with_alpha(const TokenizedCorpus& target,
                                   const TokenizedCorpus& contrast,
                                   const std::map<std::string, double>& alpha_w, double alpha0,
                                   const LogOddsOptions& opts) {
    if (target.docs.empty() || contrast.docs.empty()) {
        throw ParameterError("log_odds needs nonempty target and contrast corpora");
    }
    TermScoreTable table;
    table.method = ScoreMethod::LogOdds;
    const double nt = static_cast<double>(target.total_terms());
    const double nc = static_cast<double>(contrast.total_terms());

    std::set<std::string> universe;
    for (const auto& [term, _] : target.vocab) universe.insert(term);
    for (const auto& [term, _] : contrast.vocab) universe.insert(term);

    for (const auto& term : universe) {
        const double yt = static_cast<double>(count_of(target, term));
        const double yc = static_cast<double>(count_of(contrast, term));
        if (yt + yc < static_cast<double>(opts.min_count)) continue;
        auto it = alpha_w.find(term);
        if (it == alpha_w.end() || it->second <= 0.0) continue;
        const double aw = it->second;
        const double delta = std::log((yt + aw) / (nt + alpha0 - yt - aw)) -
                             std::log((yc + aw) / (nc + alpha0 - yc - aw));
        double score = delta;
        if (opts.z_score) {
            const double variance = 1.0 / (yt + aw) + 1.0 / (yc + aw);
            score = delta / std::sqrt(variance);
        }
        table.rows.push_back({term, score});
    }
    table.sort_rows();
    table.metadata["alpha_scale"] = format_double(opts.alpha_scale);
    table.metadata["min_count"] = std::to_string(opts.min_count);
    table.metadata["variant"] = opts.z_score ? "dirichlet_z" : "smoothed_delta";
    table.metadata["n"] = std::to_string(target.n);
    return table;
}

}  // namespace

TermScoreTable log_odds(const TokenizedCorpus& target, const TokenizedCorpus& contrast,
                        const TokenizedCorpus& prior, const LogOddsOptions& opts) {
    std::map<std::string, double> alpha_w;
    double alpha0 = 0.0;
    for (const auto& [term, count] : prior.vocab) {
        const double a = opts.alpha_scale * static_cast<double>(count);
        alpha_w[term] = a;
        alpha0 += a;
    }
    auto table = log_odds_with_alpha(target, contrast, alpha_w, alpha0, opts);
    table.metadata["prior"] = "corpus";
    return table;
}

TermScoreTable log_odds_uniform(const TokenizedCorpus& target, const TokenizedCorpus& contrast,
                                const LogOddsOptions& opts) {
    std::map<std::string, double> alpha_w;
    for (const auto& [term, _] : target.vocab) alpha_w[term] = opts.alpha_scale;
    for (const auto& [term, _] : contrast.vocab) alpha_w[term] = opts.alpha_scale;
    const double alpha0 = opts.alpha_scale * static_cast<double>(alpha_w.size());
    auto table = log_odds_with_alpha(target, contrast, alpha_w, alpha0, opts);
    table.metadata["prior"] = "uniform";
    return table;
}

TermScoreTable proportion_shift(const TokenizedCorpus& target, const TokenizedCorpus& contrast) {
    const double nt = static_cast<double>(target.total_terms());
    const double nc = static_cast<double>(contrast.total_terms());
    if (nt == 0.0 || nc == 0.0) throw ParameterError("proportion_shift needs nonempty corpora");
    std::set<std::string> universe;
    for (const auto& [term, _] : target.vocab) universe.insert(term);
    for (const auto& [term, _] : contrast.vocab) universe.insert(term);
    TermScoreTable table;
    table.method = ScoreMethod::ProportionShift;
    for (const auto& term : universe) {
        const double pt = static_cast<double>(count_of(target, term)) / nt;
        const double pc = static_cast<double>(count_of(contrast, term)) / nc;
        table.rows.push_back({term, pt - pc});
    }
    table.sort_rows();
    table.metadata["n"] = std::to_string(target.n);
    return table;
}

ShiftSides shift_sides(const TermScoreTable& shift, std::size_t k) {
    ShiftSides sides;
    for (const auto& row : shift.rows) {
        if (row.score > 0.0 && sides.positive.size() < k) sides.positive.push_back(row);
    }
    for (auto it = shift.rows.rbegin(); it != shift.rows.rend(); ++it) {
        if (it->score < 0.0 && sides.negative.size() < k) sides.negative.push_back(*it);
    }
    return sides;
}

TermScoreTable tfidf_ngrams(const TokenizedCorpus& tc, std::size_t top_k,
                            TfidfAggregation aggregation) {
    if (top_k < 1) throw ParameterError("top_k must be >= 1");
    const double n_docs = static_cast<double>(tc.docs.size());
    std::map<std::string, std::size_t> df;
    std::vector<std::map<std::string, std::size_t>> tf(tc.docs.size());
    for (std::size_t d = 0; d < tc.docs.size(); ++d) {
        for (const auto& term : tc.docs[d]) ++tf[d][term];
        for (const auto& [term, _] : tf[d]) ++df[term];
    }
    std::map<std::string, double> score;
    for (const auto& doc_tf : tf) {
        for (const auto& [term, count] : doc_tf) {
            const double idf =
                std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[term]))) + 1.0;
            const double value = static_cast<double>(count) * idf;
            auto [it, inserted] = score.emplace(term, value);
            if (!inserted) {
                it->second = aggregation == TfidfAggregation::Max ? std::max(it->second, value)
                                                                  : it->second + value;
            }
        }
    }
    TermScoreTable table;
    table.method = ScoreMethod::Tfidf;
    for (const auto& [term, s] : score) table.rows.push_back({term, s});
    table.sort_rows();
    if (table.rows.size() > top_k) table.rows.resize(top_k);
    table.metadata["aggregation"] = aggregation == TfidfAggregation::Max ? "max" : "sum";
    table.metadata["top_k"] = std::to_string(top_k);
    table.metadata["n"] = std::to_string(tc.n);
    return table;
}

std::map<std::string, TermScoreTable> c_tfidf(
    const std::map<std::string, TokenizedCorpus>& classes) {
    if (classes.empty()) throw ParameterError("c_tfidf needs at least one class");
    std::map<std::string, double> f;
    double total = 0.0;
    for (const auto& [name, tc] : classes) {
        if (tc.total_terms() == 0) throw ParameterError("c_tfidf class '" + name + "' is empty");
        for (const auto& [term, count] : tc.vocab) {
            f[term] += static_cast<double>(count);
            total += static_cast<double>(count);
        }
    }
    const double avg = total / static_cast<double>(classes.size());
    std::map<std::string, TermScoreTable> out;
    for (const auto& [name, tc] : classes) {
        TermScoreTable table;
        table.method = ScoreMethod::CTfidf;
        for (const auto& [term, count] : tc.vocab) {
            const double tf = static_cast<double>(count);
            table.rows.push_back({term, tf * std::log(1.0 + avg / f[term])});
        }
        table.sort_rows();
        table.metadata["class"] = name;
        table.metadata["avg_tokens_per_class"] = format_double(avg);
        out.emplace(name, std::move(table));
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string table_to_csv(const TermScoreTable& table) {
    std::string params;
    for (const auto& [k, v] : table.metadata) {
        if (!params.empty()) params += ';';
        params += k + "=" + v;
    }
    std::string out = "term,score,method,params\n";
    for (const auto& row : table.rows) {
        out += csv_field(row.term) + "," + format_double(row.score) + "," +
               std::string(to_string(table.method)) + "," + csv_field(params) + "\n";
    }
    return out;
}

}  // namespace csakit
