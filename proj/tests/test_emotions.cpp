#include "doctest.h"

#include <stdexcept>

#include "csakit/emotions.hpp"

using namespace csakit;

namespace {

Corpus texts(const std::vector<std::string>& bodies) {
    Corpus c;
    for (std::size_t i = 0; i < bodies.size(); ++i) c.posts.push_back(Post{"p" + std::to_string(i), "", "", "", bodies[i], 0, {}});
    return c;
}

class FlakyBackend final : public EmotionBackend {
public:
    std::string name() const override { return "flaky"; }
    EmotionDistribution probabilities(const std::string& text) const override {
        if (text.find("boom") != std::string::npos) throw std::runtime_error("backend failed");
        if (text.find("bad") != std::string::npos) return {0.5, 0.5, 0.5, 0, 0, 0, 0};
        return {0, 0, 0, 0, 0, 0, 1};
    }
};

}  // namespace

TEST_CASE("exactly seven emotions in the documented order") {
    CHECK(kAllEmotions.size() == 7);
    CHECK(to_string(kAllEmotions[0]) == "anger");
    CHECK(to_string(kAllEmotions[6]) == "joy");
    for (auto e : kAllEmotions) CHECK(parse_emotion(to_string(e)) == e);
}

TEST_CASE("stub backends") {
    const Corpus c = texts({"one", "two"});
    EmotionDistribution uniform;
    uniform.fill(1.0 / 7.0);
    for (const auto& [id, e] : label_emotions(c, ConstantEmotionBackend(uniform)).labels) CHECK(e == EmotionLabel::Anger);
    for (const auto& [id, e] : label_emotions(c, ConstantEmotionBackend({0, 0, 1, 0, 0, 0, 0})).labels) {
        CHECK(e == EmotionLabel::Fear);
    }
    const auto h = HashEmotionBackend().probabilities("x");
    double total = 0;
    for (double v : h) total += v;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("failures are counted and the run continues") {
    const auto r = label_emotions(texts({"fine", "boom", "bad", "ok"}), FlakyBackend());
    CHECK(r.labels.size() == 2);
    CHECK(r.failed == std::vector<std::string>{"p1", "p2"});
}

TEST_CASE("fear templates are mostly labelled fear") {
    std::vector<std::string> bodies;
    const std::vector<std::string> templates = {"I am so scared and afraid tonight", "the panic and dread never stop",
                                                "terrified of every nightmare", "I feel unsafe and frightened",
                                                "constant fear at home"};
    for (int i = 0; i < 20; ++i) bodies.push_back(templates[static_cast<std::size_t>(i) % templates.size()]);
    const auto r = label_emotions(texts(bodies), LexiconEmotionBackend());
    int fear = 0;
    for (const auto& [id, e] : r.labels) fear += e == EmotionLabel::Fear;
    CHECK(fear > 10);
}

TEST_CASE("emotion profile") {
    const std::map<std::string, EmotionLabel> labels = {
        {"p1", EmotionLabel::Fear}, {"p2", EmotionLabel::Fear}, {"p3", EmotionLabel::Sadness}};
    const auto p = emotion_profile(labels);
    CHECK(p.at(EmotionLabel::Fear) == doctest::Approx(2.0 / 3.0));
    CHECK(p.at(EmotionLabel::Sadness) == doctest::Approx(1.0 / 3.0));
    double total = 0;
    for (const auto& [e, v] : p) total += v;
    CHECK(std::abs(total - 1.0) <= 1e-9);
    for (const auto& [e, v] : emotion_profile({})) CHECK(v == 0.0);
}
