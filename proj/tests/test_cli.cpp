#include "doctest.h"

#include <sstream>

#include "csakit/corpus.hpp"
#include "csakit/figures.hpp"
#include "support.hpp"

using namespace csakit;
using testkit::cli;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

// synth -> split -> train both stages, small and quick.
void build_run(const testkit::TempDir& dir) {
    write_text_file(dir / "train.toml", "learning_rate = 0.001\nepochs = 3\n");
    const auto s = dir.path().string();
    REQUIRE(cli({"synth", "--posts-per-cell", "8", "--out", s + "/synth"}).code == 0);
    REQUIRE(cli({"split", "--with", s + "/synth/with_csa", "--without", s + "/synth/without_csa", "--out",
                 s + "/split"}).code == 0);
    REQUIRE(cli({"train", "--split", s + "/split", "--stage", "1", "--config", s + "/train.toml", "--out",
                 s + "/model"}).code == 0);
    REQUIRE(cli({"train", "--split", s + "/split", "--stage", "2", "--config", s + "/train.toml", "--out",
                 s + "/model"}).code == 0);
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    auto r = cli({"synth", "--bogus", "x", "--out", "/tmp/x"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: usage:", 0) == 0);
    CHECK(count_of(r.err, "\n") == 1);
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("missing inputs report their category") {
    auto r = cli({"train", "--split", "/nonexistent/split", "--out", "/tmp/csakit-never"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: input-not-found:", 0) == 0);
    r = cli({"train", "--split", "/nonexistent/split", "--backend", "bert-large", "--out", "/tmp/x"});
    CHECK(r.err.rfind("error: parameter:", 0) == 0);
}

TEST_CASE("train, evaluate, predict, explain and report") {
    testkit::TempDir dir("cli-pipeline");
    build_run(dir);
    const auto s = dir.path().string();
    auto r = cli({"evaluate", "--model", s + "/model", "--split", s + "/split"});
    REQUIRE(r.code == 0);
    const auto metrics = nlohmann::json::parse(read_text_file(dir / "model/metrics.json"));
    CHECK(metrics.contains("stage1"));
    CHECK(metrics.contains("stage2"));
    CHECK(std::filesystem::exists(dir / "model/metrics.json.manifest.json"));
    CHECK(std::filesystem::exists(dir / "model/train_stage1.manifest.json"));
    CHECK(std::filesystem::exists(dir / "split/run_manifest.json"));

    testkit::write_jsonl(dir / "in.jsonl", {{{"id", "a"}, {"text", "hello there"}},
                                            {{"id", "b"}, {"text", read_corpus(dir / "synth/with_csa").posts[0].canonical_text()}}});
    REQUIRE(cli({"predict", "--model", s + "/model", "--in", s + "/in.jsonl", "--out", s + "/pred.jsonl"}).code == 0);
    std::istringstream preds(read_text_file(dir / "pred.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(preds, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j["background"] == "without_csa") CHECK(j["conditions"].empty());
        ++n;
    }
    CHECK(n == 2);

    REQUIRE(cli({"explain", "--model", s + "/model", "--in", s + "/in.jsonl", "--steps", "16", "--out",
                 s + "/explain.html"}).code == 0);
    CHECK(read_text_file(dir / "explain.html").find("attributions") != std::string::npos);

    REQUIRE(cli({"report", "--run", s}).code == 0);
    const std::string html = read_text_file(dir / "report.html");
    CHECK(html.find("metrics.json") != std::string::npos);
    CHECK(count_of(html, "<html") == 1);

    r = cli({"predict", "--model", s + "/model", "--in", s + "/missing.jsonl", "--out", s + "/p.jsonl"});
    CHECK(r.err.rfind("error: input-not-found:", 0) == 0);
}

TEST_CASE("analysis subcommands write tables and figures") {
    testkit::TempDir dir("cli-analysis");
    const auto s = dir.path().string();
    REQUIRE(cli({"synth", "--posts-per-cell", "8", "--out", s + "/synth"}).code == 0);
    const std::string w = s + "/synth/with_csa", o = s + "/synth/without_csa";
    CHECK(cli({"shift", "--target", w, "--contrast", o, "--out", s + "/shift.csv", "--plot", s + "/shift.svg"}).code == 0);
    CHECK(cli({"logodds", "--target", w, "--contrast", o, "--out", s + "/logodds.csv"}).code == 0);
    CHECK(cli({"tfidf", "--corpus", w, "--ngram", "2", "--out", s + "/tfidf.csv", "--wordcloud", s + "/cloud.svg"}).code == 0);
    CHECK(cli({"ctfidf", "--class", "with=" + w, "--class", "without=" + o, "--out", s + "/ctfidf"}).code == 0);
    CHECK(cli({"topics", "--corpus", w, "--k-candidates", "2..4", "--out", s + "/topics.json"}).code == 0);
    CHECK(cli({"emotions", "--corpus", "with=" + w, "--corpus", "without=" + o, "--out", s + "/emotions.csv", "--plot",
               s + "/emotions.svg"}).code == 0);
    CHECK(cli({"overlap", "--corpus", "with=" + w, "--corpus", "without=" + o, "--out", s + "/overlap.json", "--plot",
               s + "/overlap.svg"}).code == 0);
    for (const char* f : {"shift.csv", "shift.svg", "logodds.csv", "tfidf.csv", "cloud.svg", "ctfidf/with.csv",
                          "ctfidf/without.csv", "topics.json", "emotions.csv", "emotions.profile.json", "emotions.svg",
                          "overlap.json", "overlap.svg", "shift.csv.manifest.json", "ctfidf/run_manifest.json"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
    }
    CHECK(read_text_file(dir / "shift.csv").rfind("term,score,method,params\n", 0) == 0);
}

TEST_CASE("ingest applies the salt and writes a report") {
    testkit::TempDir dir("cli-ingest");
    const auto s = dir.path().string();
    testkit::write_jsonl(dir / "arch.jsonl", testkit::community_archive());
    auto r = cli({"ingest", "--archive", s + "/arch.jsonl", "--salt", "00ff10", "--out", s + "/corpus", "--audit", "5"});
    REQUIRE(r.code == 0);
    const auto rep = nlohmann::json::parse(read_text_file(dir / "corpus/ingest_report.json"));
    CHECK(rep["posts"] == 7957);
    CHECK(rep["per_subreddit"]["adultsurvivors"]["out"] == 6447);
    const auto first = read_text_file(dir / "corpus/posts.jsonl");
    REQUIRE(cli({"ingest", "--archive", s + "/arch.jsonl", "--salt", "00ff10", "--out", s + "/corpus2"}).code == 0);
    CHECK(read_text_file(dir / "corpus2/posts.jsonl") == first);
    CHECK(first.find("user1\"") == std::string::npos);
    r = cli({"ingest", "--archive", s + "/arch.jsonl", "--salt", "zz", "--out", s + "/c3"});
    CHECK(r.code == 1);
}

TEST_CASE("figures") {
    testkit::TempDir dir("figs");
    std::ostringstream warn;
    std::vector<std::pair<std::string, double>> bars;
    for (const char* code : {"D", "A", "P", "DA", "DP", "AP", "DAP", "none"}) bars.emplace_back(code, 3.0);
    REQUIRE(bar_chart_svg("Labels", bars, dir / "bars.svg", warn));
    // One background rectangle plus one per bar.
    CHECK(count_of(read_text_file(dir / "bars.svg"), "<rect") == 9);

    ShiftSides one_sided;
    one_sided.positive = {{"abuse", 0.2}, {"trauma", 0.1}};
    CHECK(shift_chart_svg("Shift", one_sided, dir / "shift.svg", warn));
    CHECK(warn.str().find("only positive") != std::string::npos);

    std::vector<std::string> cats = {"anger", "sadness", "fear", "disgust", "neutral", "surprise", "joy"};
    std::map<std::string, std::vector<double>> series = {{"with", std::vector<double>(7, 0.1)},
                                                         {"without", std::vector<double>(7, 0.2)}};
    REQUIRE(grouped_bar_svg("Emotions", cats, series, dir / "emo.svg", warn));
    CHECK(count_of(read_text_file(dir / "emo.svg"), "<rect") == 1 + 2 + 14);

    std::ostringstream empty_warn;
    CHECK_FALSE(bar_chart_svg("x", {}, dir / "none.svg", empty_warn));
    CHECK_FALSE(std::filesystem::exists(dir / "none.svg"));
    CHECK(empty_warn.str().find("warning") != std::string::npos);

    // Same inputs, same bytes.
    REQUIRE(bar_chart_svg("Labels", bars, dir / "bars2.svg", warn));
    CHECK(read_text_file(dir / "bars.svg") == read_text_file(dir / "bars2.svg"));
}
