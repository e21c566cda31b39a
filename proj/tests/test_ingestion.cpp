#include "doctest.h"

#include "csakit/errors.hpp"
#include "csakit/hashing.hpp"
#include "csakit/ingestion.hpp"
#include "support.hpp"

using namespace csakit;
using nlohmann::json;

namespace {

json record(const std::string& id, const std::string& sub, const std::string& text,
            const std::string& author = "alice") {
    return {{"id", id}, {"author", author}, {"subreddit", sub}, {"title", ""}, {"selftext", text},
            {"created_utc", 1600000000}};
}

}  // namespace

TEST_CASE("read_archive skips malformed lines") {
    testkit::TempDir dir("archive");
    csakit::write_text_file(dir / "a.jsonl", "{\"id\":\"1\"}\nnot json\n{\"id\":\"2\",\"x\":1}\n");
    const auto r = read_archive(dir / "a.jsonl");
    CHECK(r.records.size() == 2);
    CHECK(r.skipped == 1);
    csakit::write_text_file(dir / "empty.jsonl", "");
    CHECK(read_archive(dir / "empty.jsonl").records.empty());
    CHECK_THROWS_AS(read_archive(dir / "missing.jsonl"), InputNotFound);
}

TEST_CASE("well-formed record is kept verbatim") {
    testkit::TempDir dir("archive1");
    const json rec = record("z9", "ptsd", "hello");
    testkit::write_jsonl(dir / "one.jsonl", {rec});
    const auto r = read_archive(dir / "one.jsonl");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0] == rec);
}

TEST_CASE("clean drops deleted and removed posts and hides authors") {
    const std::vector<json> recs = {record("1", "ptsd", "[removed]"), record("2", "ptsd", "[deleted]"),
                                    record("3", "ptsd", "alice wrote this", "alice"),
                                    record("4", "ptsd", "hi", "throwaway_123")};
    CleanReport rep;
    const auto posts = clean(recs, "salt", &rep);
    REQUIRE(posts.size() == 2);
    CHECK(posts[0].id == "3");
    CHECK(posts[0].author_hash == hash_author("salt", "alice"));
    CHECK(posts[0].author_hash.size() == 32);
    CHECK(posts[0].body.find("alice") == std::string::npos);
    CHECK(posts[1].flags.contains(PostFlag::Throwaway));
    CHECK(rep.per_subreddit["ptsd"].in == 4);
    CHECK(rep.per_subreddit["ptsd"].out == 2);
}

TEST_CASE("clean reproduces the per-community cleaning counts") {
    const auto recs = testkit::community_archive();
    CleanReport rep;
    const auto posts = clean(recs, "k", &rep);
    for (const auto& row : testkit::community_counts()) {
        CHECK(rep.per_subreddit[row.subreddit].in == static_cast<std::size_t>(row.in));
        CHECK(rep.per_subreddit[row.subreddit].out == static_cast<std::size_t>(row.out));
    }
    CHECK(posts.size() == 7957);
}

TEST_CASE("combined collection yields 7957 labelled posts") {
    const auto recs = testkit::community_archive();
    const auto lex = default_lexicon();
    CollectReport rep;
    const Corpus c = collect(recs, default_rules(lex), lex, "k", &rep);
    CHECK(c.posts.size() == 7957);
    CHECK(c.background == BackgroundTag::WithCsa);
    CHECK(validate_corpus(c).empty());
}

TEST_CASE("keyword matching") {
    const auto lex = default_lexicon();
    CHECK(match_keywords_text("my trauma and panic attack", lex) ==
          LabelSet{ConditionLabel::Ptsd, ConditionLabel::Anxiety});
    CHECK(match_keywords_text("a quiet afternoon", lex).empty());
    CHECK(match_keywords_text("depressed and hopeless", lex) == LabelSet{ConditionLabel::Depression});
    CHECK(match_keywords_text("My TRAUMA", lex) == LabelSet{ConditionLabel::Ptsd});
}

TEST_CASE("keyword matching agrees with an exhaustive scan") {
    // Oracle: a phrase matches when it occurs bounded by non-word characters.
    const auto lex = default_lexicon();
    auto oracle = [&](const std::string& text) {
        std::string low;
        for (char c : text) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        LabelSet out;
        auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); };
        for (const auto& [label, phrases] : lex.entries) {
            for (const auto& ph : phrases) {
                for (std::size_t pos = low.find(ph); pos != std::string::npos; pos = low.find(ph, pos + 1)) {
                    const bool left = pos == 0 || !word(low[pos - 1]);
                    const bool right = pos + ph.size() == low.size() || !word(low[pos + ph.size()]);
                    if (left && right) out.insert(label);
                }
            }
        }
        return out;
    };
    const std::vector<std::string> pieces = {"trauma", "traumatic", "panic", "attack", "panic attack", "ptsd",
                                             "depression", "hopeless", "the", "and", "phobia", "x", "csa",
                                             "Depressed", "anxiety", "stress", "posttraumatic stess disroder"};
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const int n = 1 + static_cast<int>(gen() % 6);
        for (int i = 0; i < n; ++i) {
            if (i > 0) text += gen() % 4 == 0 ? ", " : " ";
            text += pieces[gen() % pieces.size()];
        }
        CHECK_MESSAGE(match_keywords_text(text, lex) == oracle(text), text);
    }
}

TEST_CASE("mentalhealth rule needs a marker and labels per keyword") {
    const auto lex = default_lexicon();
    const std::vector<json> recs = {record("m1", "mentalhealth", "csa and trauma"),
                                    record("m2", "mentalhealth", "just trauma"),
                                    record("m3", "gaming", "csa trauma")};
    CollectReport rep;
    const Corpus c = collect(recs, default_rules(lex), lex, "k", &rep);
    REQUIRE(c.posts.size() == 1);
    CHECK(c.posts[0].id == "m1");
    CHECK(c.labels_of("m1") == LabelSet{ConditionLabel::Ptsd});
    CHECK(rep.ignored_subreddits["gaming"] == 1);
    CHECK(collect(std::vector<json>{}, default_rules(lex), lex, "k").posts.empty());
}

TEST_CASE("fixed-trait community and duplicate ids") {
    const auto lex = default_lexicon();
    const std::vector<json> recs = {record("d1", "Depression", "csa survivor here"),
                                    record("d1", "depression", "csa again"),
                                    record("d2", "depression", "no marker at all")};
    CollectReport rep;
    const Corpus c = collect(recs, default_rules(lex), lex, "k", &rep);
    REQUIRE(c.posts.size() == 1);
    CHECK(c.labels_of("d1") == LabelSet{ConditionLabel::Depression});
    CHECK(rep.duplicate_ids == 1);
}

TEST_CASE("negative corpus excludes marker posts and out-of-scope labels") {
    const auto lex = default_lexicon();
    std::vector<json> recs = {record("n1", "depression", "feeling low"),
                              record("n2", "depression", "childhood sexual abuse story"),
                              record("n3", "bipolar", "mood swings")};
    recs.push_back(record("n4", "x", "panic again"));
    recs.back()["labels"] = {"anxiety", "ptsd"};
    const Corpus c = build_negative_corpus(recs, lex, "k");
    CHECK(c.background == BackgroundTag::WithoutCsa);
    REQUIRE(c.posts.size() == 2);
    CHECK(c.labels_of("n1") == LabelSet{ConditionLabel::Depression});
    CHECK(c.labels_of("n4") == LabelSet{ConditionLabel::Anxiety, ConditionLabel::Ptsd});
}

TEST_CASE("rule files resolve symbolic phrase sets") {
    const auto lex = default_lexicon();
    const json j = {{"rules",
                     {{{"subreddit", "ptsd"}, {"include", "background_markers"}, {"require_background_marker", true},
                       {"trait", "ptsd"}}}}};
    const auto rules = rules_from_json(j, lex);
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].include_phrases == lex.background_markers);
    CHECK(rules[0].trait == TraitMode::Fixed);
    CHECK(rules[0].fixed_label == ConditionLabel::Ptsd);
}

TEST_CASE("audit sample is deterministic") {
    const auto lex = default_lexicon();
    const Corpus c = collect(testkit::community_archive(), default_rules(lex), lex, "k");
    const auto a = audit_sample(c, 10, 3);
    CHECK(a.size() == 10);
    CHECK(a == audit_sample(c, 10, 3));
    CHECK(a != audit_sample(c, 10, 4));
}

TEST_CASE("hashing primitives") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // RFC 4231 test case 2.
    CHECK(hmac_sha256_hex("Jefe", "what do ya want for nothing?") ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
    CHECK(hex_decode("4a6566") == "Jef");
    CHECK_THROWS_AS(hex_decode("zz"), ParameterError);
}
