#include "doctest.h"

#include <set>

#include "csakit/errors.hpp"
#include "csakit/split.hpp"
#include "support.hpp"

using namespace csakit;

namespace {

Corpus numbered(const std::string& prefix, std::size_t n, BackgroundTag bg) {
    Corpus c;
    c.background = bg;
    for (std::size_t i = 0; i < n; ++i) {
        c.posts.push_back(Post{prefix + std::to_string(i), "", "", "", "text " + std::to_string(i), 0, {}});
        c.labels[c.posts.back().id] = {kAllConditions[i % 3]};
    }
    return c;
}

std::set<std::string> ids(const std::vector<LabeledPost>& v) {
    std::set<std::string> s;
    for (const auto& p : v) s.insert(p.post.id);
    return s;
}

}  // namespace

TEST_CASE("split sizes follow the reference arithmetic") {
    const SplitSpec spec;
    const auto s1 = split_sizes(7957 + 9136, spec);
    CHECK(s1.train == 12306);
    CHECK(s1.val == 1368);
    CHECK(s1.test == 3419);
    const auto s2 = split_sizes(7957, spec);
    CHECK(s2.train == 5728);
    CHECK(s2.val == 637);
    CHECK(s2.test == 1592);
    CHECK(split_sizes(20, spec).test == 4);
}

TEST_CASE("split membership is disjoint and seeded") {
    const Corpus w = numbered("w", 50, BackgroundTag::WithCsa);
    const Corpus o = numbered("o", 40, BackgroundTag::WithoutCsa);
    SplitSpec spec;
    spec.seed = 1;
    const auto a = split(w, o, spec);
    for (const auto* sets : {&a.stage1, &a.stage2}) {
        auto tr = ids(sets->train), va = ids(sets->val), te = ids(sets->test);
        for (const auto& id : va) CHECK_FALSE(tr.contains(id));
        for (const auto& id : te) CHECK_FALSE(tr.contains(id));
        for (const auto& id : te) CHECK_FALSE(va.contains(id));
    }
    for (const auto& p : a.stage2.train) CHECK(p.background == BackgroundTag::WithCsa);
    const auto b = split(w, o, spec);
    CHECK(ids(a.stage1.test) == ids(b.stage1.test));
    spec.seed = 2;
    const auto c = split(w, o, spec);
    CHECK(ids(a.stage1.test) != ids(c.stage1.test));
    CHECK(c.stage1.test.size() == a.stage1.test.size());
    spec.stratified = true;
    const auto d = split(w, o, spec);
    CHECK(d.stage1.train.size() + d.stage1.val.size() + d.stage1.test.size() == 90);
}

TEST_CASE("split rejects overlapping ids and empty corpora") {
    const Corpus w = numbered("x", 5, BackgroundTag::WithCsa);
    CHECK_THROWS_AS(split(w, w, SplitSpec{}), InputError);
    CHECK_THROWS_AS(split(Corpus{}, w, SplitSpec{}), InputError);
}

TEST_CASE("split persistence round trip") {
    testkit::TempDir dir("split");
    const auto data = split(numbered("w", 30, BackgroundTag::WithCsa), numbered("o", 30, BackgroundTag::WithoutCsa),
                            SplitSpec{});
    write_split(data, SplitSpec{}, dir.path());
    const auto back = read_split(dir.path());
    CHECK(ids(back.stage1.train) == ids(data.stage1.train));
    CHECK(ids(back.stage2.test) == ids(data.stage2.test));
    REQUIRE_FALSE(back.stage2.test.empty());
    CHECK(back.stage2.test[0].labels == data.stage2.test[0].labels);
}
