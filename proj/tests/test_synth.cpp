#include "doctest.h"

#include <algorithm>

#include "csakit/errors.hpp"
#include "csakit/ingestion.hpp"
#include "csakit/synth.hpp"
#include "csakit/text.hpp"

using namespace csakit;

TEST_CASE("default spec cell counts") {
    const auto spec = default_synth_spec(10, 0);
    CHECK(spec.cells.size() == 14);
    const auto c = generate(spec);
    CHECK(c.with_csa.posts.size() == 70);
    CHECK(c.without_csa.posts.size() == 70);
    CHECK(validate_corpus(c.with_csa).empty());
    CHECK(validate_corpus(c.without_csa).empty());
}

TEST_CASE("eight-cell spec gives exact counts") {
    SynthSpec spec = default_synth_spec(10, 0);
    spec.cells.resize(8);
    const auto c = generate(spec);
    CHECK(c.with_csa.posts.size() + c.without_csa.posts.size() == 80);
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate(default_synth_spec(5, 1));
    const auto b = generate(default_synth_spec(5, 1));
    const auto c = generate(default_synth_spec(5, 2));
    CHECK(a.with_csa == b.with_csa);
    CHECK(a.without_csa == b.without_csa);
    CHECK_FALSE(a.with_csa == c.with_csa);
}

TEST_CASE("cell markers appear only in their cell") {
    nlohmann::json j = {{"posts_per_cell", 6},
                        {"cells",
                         {{{"background", "with_csa"}, {"labels", {"ptsd"}}, {"markers", {"traumaq", "flashq"}}},
                          {{"background", "with_csa"}, {"labels", {"depression"}}, {"markers", {"lowq", "greyq"}}}}}};
    const auto spec = spec_from_json(j);
    const auto c = generate(spec);
    for (const auto& p : c.with_csa.posts) {
        const auto text = p.canonical_text();
        const bool has = text.find("traumaq") != std::string::npos || text.find("flashq") != std::string::npos;
        CHECK(has == c.with_csa.labels_of(p.id).contains(ConditionLabel::Ptsd));
    }
}

TEST_CASE("each post carries at least three markers, one per label") {
    const auto spec = default_synth_spec(10, 3);
    const auto c = generate(spec);
    for (const auto* corpus : {&c.with_csa, &c.without_csa}) {
        for (const auto& p : corpus->posts) {
            const auto text = p.canonical_text();
            const auto labels = corpus->labels_of(p.id);
            for (const auto& cell : spec.cells) {
                if (cell.labels != labels || cell.background != corpus->background) continue;
                int hits = 0;
                for (const auto& tok : simple_tokens(text)) {
                    hits += std::find(cell.markers.begin(), cell.markers.end(), tok) != cell.markers.end();
                }
                CHECK(hits >= 3);
            }
        }
    }
}

TEST_CASE("marker lexicon recovers every label set") {
    const auto spec = default_synth_spec(10, 0);
    const auto lex = lexicon_from_spec(spec);
    CHECK(validate_lexicon(lex).empty());
    const auto c = generate(spec);
    for (const auto* corpus : {&c.with_csa, &c.without_csa}) {
        for (const auto& p : corpus->posts) CHECK(match_keywords(p, lex) == corpus->labels_of(p.id));
    }
}

TEST_CASE("overlapping vocabularies are rejected") {
    SynthSpec spec = default_synth_spec(2, 0);
    spec.cells[1].markers.push_back(spec.cells[0].markers[0]);
    CHECK_THROWS_AS(spec.validate(), SpecError);
    SynthSpec filler = default_synth_spec(2, 0);
    filler.filler.push_back(filler.cells[0].markers[0]);
    CHECK_THROWS_AS(generate(filler), SpecError);
}

TEST_CASE("pseudo words survive normalisation") {
    for (std::size_t i = 0; i < 2000; i += 37) {
        const auto w = pseudo_word(i * 7919 + 11);
        CHECK(lemmatize(w) == w);
        CHECK_FALSE(stopwords().contains(w));
        CHECK(w.back() != 's');
    }
}
