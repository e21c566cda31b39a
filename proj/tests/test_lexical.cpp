#include "doctest.h"

#include <cmath>
#include <random>

#include "csakit/errors.hpp"
#include "csakit/lexical.hpp"
#include "oracles.hpp"

using namespace csakit;

namespace {

TokenizedCorpus docs(std::vector<std::vector<std::string>> d) { return TokenizedCorpus::from_docs(std::move(d)); }

std::vector<std::vector<std::string>> random_docs(std::mt19937_64& gen, std::size_t max_docs) {
    static const std::vector<std::string> vocab = {"abuse", "trauma", "work", "sleep", "panic", "mood",
                                                   "therapy", "night", "job", "family", "fear", "help"};
    std::vector<std::vector<std::string>> d(1 + gen() % max_docs);
    for (auto& doc : d) {
        doc.resize(1 + gen() % 8);
        for (auto& w : doc) w = vocab[gen() % (3 + gen() % (vocab.size() - 3))];
    }
    return d;
}

double score_of(const TermScoreTable& t, const std::string& term) {
    const auto* row = t.find(term);
    REQUIRE(row != nullptr);
    return row->score;
}

}  // namespace

TEST_CASE("tokenize builds bigrams within sentences") {
    const std::vector<std::string> texts = {"alpha beta gamma. delta epsilon"};
    NormalizeOptions raw;
    raw.remove_stopwords = false;
    raw.lemmatize = false;
    const auto tc = tokenize_texts(texts, 2, raw);
    REQUIRE(tc.docs.size() == 1);
    CHECK(tc.docs[0] == std::vector<std::string>{"alpha beta", "beta gamma", "delta epsilon"});
    CHECK_THROWS_AS(tokenize_texts(texts, 3), ParameterError);
    CHECK(tokenize_texts(std::vector<std::string>{}, 1).docs.empty());
}

TEST_CASE("proportion shift hand example") {
    const auto t = docs({{"abuse", "abuse", "trauma"}});
    const auto c = docs({{"work", "job", "work"}});
    const auto table = proportion_shift(t, c);
    CHECK(score_of(table, "abuse") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(score_of(table, "work") == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
    for (const auto& row : proportion_shift(t, t).rows) CHECK(row.score == 0.0);
}

TEST_CASE("log-odds hand example ranks the target-only word first") {
    const auto t = docs({{"fruitlessly", "fruitlessly"}, {"hopeless"}});
    const auto c = docs({{"hopeless", "hopeless"}});
    LogOddsOptions opts;
    opts.alpha_scale = 1e-6;
    const auto table = log_odds_uniform(t, c, opts);
    REQUIRE_FALSE(table.rows.empty());
    CHECK(table.rows.front().term == "fruitlessly");
    for (const auto& row : log_odds(t, t, merge_corpora(t, t)).rows) CHECK(row.score == 0.0);
}

TEST_CASE("lexical statistics match brute force on random small corpora") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_docs(gen, 10);
        const auto b = random_docs(gen, 10);
        const auto ta = docs(a), tb = docs(b);

        const auto lo = log_odds(ta, tb, merge_corpora(ta, tb));
        auto prior = a;
        prior.insert(prior.end(), b.begin(), b.end());
        const auto lo_ref = oracle::log_odds(a, b, prior, 1.0, 2);
        CHECK(lo.rows.size() == lo_ref.size());
        for (const auto& row : lo.rows) CHECK(std::abs(row.score - lo_ref.at(row.term)) <= 1e-9);

        // Swapping the corpora negates every score.
        const auto swapped = log_odds(tb, ta, merge_corpora(ta, tb));
        for (const auto& row : lo.rows) CHECK(std::abs(row.score + score_of(swapped, row.term)) <= 1e-9);

        const auto sh = proportion_shift(ta, tb);
        const auto sh_ref = oracle::proportion_shift(a, b);
        double total = 0;
        for (const auto& row : sh.rows) {
            CHECK(std::abs(row.score - sh_ref.at(row.term)) <= 1e-9);
            total += row.score;
        }
        CHECK(std::abs(total) <= 1e-9);

        for (bool use_sum : {false, true}) {
            const auto tf = tfidf_ngrams(ta, 1000, use_sum ? TfidfAggregation::Sum : TfidfAggregation::Max);
            const auto tf_ref = oracle::tfidf(a, use_sum);
            CHECK(tf.rows.size() == tf_ref.size());
            for (const auto& row : tf.rows) CHECK(std::abs(row.score - tf_ref.at(row.term)) <= 1e-9);
        }

        const auto ct = c_tfidf({{"a", ta}, {"b", tb}});
        const auto ct_ref = oracle::c_tfidf({{"a", a}, {"b", b}});
        for (const auto& [name, table] : ct) {
            CHECK(table.rows.size() == ct_ref.at(name).size());
            for (const auto& row : table.rows) CHECK(std::abs(row.score - ct_ref.at(name).at(row.term)) <= 1e-9);
        }
    }
}

TEST_CASE("tfidf examples") {
    SUBCASE("bigram from the longer document leads") {
        const auto tc = docs({{"self harm", "harm self"}, {"work"}});
        const auto t = tfidf_ngrams(tc, 5);
        CHECK(t.find("self harm") != nullptr);
    }
    SUBCASE("one document ranks by raw frequency") {
        const auto t = tfidf_ngrams(docs({{"b", "a", "b", "c", "b", "a"}}), 10);
        REQUIRE(t.rows.size() == 3);
        CHECK(t.rows[0].term == "b");
        CHECK(t.rows[1].term == "a");
        CHECK(t.rows[2].term == "c");
    }
    SUBCASE("absent terms do not appear") { CHECK(tfidf_ngrams(docs({{"x"}}), 3).find("y") == nullptr); }
}

TEST_CASE("c-TF-IDF examples") {
    const auto out = c_tfidf({{"one", docs({{"abuse", "trauma"}})}, {"two", docs({{"doctor", "exam"}})}});
    CHECK(out.at("one").find("doctor") == nullptr);
    CHECK(out.at("one").rows.front().score > 0);
    const auto single = c_tfidf({{"only", docs({{"a", "a", "b"}})}});
    CHECK(score_of(single.at("only"), "a") == doctest::Approx(2.0 * std::log(1.0 + 3.0 / 2.0)));
}

TEST_CASE("csv output is stable") {
    TermScoreTable t;
    t.method = ScoreMethod::Tfidf;
    t.rows = {{"b", 0.5}, {"a, c", 0.5}};
    t.metadata["k"] = "1";
    t.sort_rows();
    CHECK(table_to_csv(t) == "term,score,method,params\n\"a, c\",0.5,tfidf,k=1\nb,0.5,tfidf,k=1\n");
}
