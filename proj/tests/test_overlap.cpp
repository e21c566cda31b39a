#include "doctest.h"

#include "csakit/errors.hpp"
#include "csakit/overlap.hpp"
#include "oracles.hpp"

#include <random>

using namespace csakit;

namespace {

Corpus with_authors(const std::vector<std::string>& authors) {
    Corpus c;
    for (std::size_t i = 0; i < authors.size(); ++i) {
        c.posts.push_back(Post{"p" + std::to_string(i), authors[i], "", "", "", 0, {}});
    }
    return c;
}

std::vector<std::string> random_authors(std::mt19937_64& gen) {
    std::vector<std::string> a(gen() % 40);
    for (auto& x : a) x = gen() % 13 == 0 ? "" : "u" + std::to_string(gen() % 60);
    return a;
}

}  // namespace

TEST_CASE("overlap counts shared distinct authors") {
    std::map<std::string, Corpus> m;
    m["a"] = with_authors({"x", "y", "y", "z"});
    m["b"] = with_authors({"y", "z", "w"});
    m["c"] = with_authors({"q"});
    const auto o = overlap(m);
    CHECK(o.at("a", "b") == 2);
    CHECK(o.at("b", "a") == 2);
    CHECK(o.at("a", "a") == 3);
    CHECK(o.at("a", "c") == 0);
    CHECK_THROWS_AS(overlap({}), ParameterError);
}

TEST_CASE("overlap agrees with pairwise scan, is symmetric and bounded") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_authors(gen);
        const auto b = random_authors(gen);
        std::map<std::string, Corpus> m{{"a", with_authors(a)}, {"b", with_authors(b)}};
        const auto o = overlap(m);
        CHECK(o.at("a", "b") == oracle::shared_authors(a, b));
        CHECK(o.at("a", "b") == o.at("b", "a"));
        CHECK(o.at("a", "b") <= std::min(o.at("a", "a"), o.at("b", "b")));
    }
}

TEST_CASE("edge list omits empty pairs") {
    const auto o = overlap_authors({"a", "b", "c"}, {{"1", "2"}, {"2"}, {"9"}});
    const auto edges = overlap_edge_list(o);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0]["common_users"] == 1);
}
