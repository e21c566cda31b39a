#include "csakit/overlap.hpp"

#include <algorithm>
#include <iterator>

#include "csakit/errors.hpp"

namespace csakit {

std::size_t OverlapMatrix::at(const std::string& a, const std::string& b) const {
    auto find = [&](const std::string& name) {
        auto it = std::find(communities.begin(), communities.end(), name);
        if (it == communities.end()) throw ParameterError("unknown community " + name);
        return static_cast<std::size_t>(it - communities.begin());
    };
    return counts[find(a)][find(b)];
}

OverlapMatrix overlap_authors(const std::vector<std::string>& names,
                              const std::vector<std::set<std::string>>& authors) {
    if (names.empty()) throw ParameterError("overlap needs at least one community");
    if (names.size() != authors.size()) throw ParameterError("names/authors size mismatch");
    const std::size_t n = names.size();
    OverlapMatrix m;
    m.communities = names;
    m.counts.assign(n, std::vector<std::size_t>(n, 0));
    m.diagonal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.diagonal[i] = authors[i].size();
        m.counts[i][i] = authors[i].size();
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t common = 0;
            auto a = authors[i].begin();
            auto b = authors[j].begin();
            while (a != authors[i].end() && b != authors[j].end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++common;
                    ++a;
                    ++b;
                }
            }
            m.counts[i][j] = common;
            m.counts[j][i] = common;
        }
    }
    return m;
}

OverlapMatrix overlap(const std::map<std::string, Corpus>& corpora) {
    std::vector<std::string> names;
    std::vector<std::set<std::string>> authors;
    for (const auto& [name, corpus] : corpora) {
        names.push_back(name);
        std::set<std::string> distinct;
        for (const auto& post : corpus.posts) {
            if (!post.author_hash.empty()) distinct.insert(post.author_hash);
        }
        authors.push_back(std::move(distinct));
    }
    return overlap_authors(names, authors);
}

nlohmann::json overlap_to_json(const OverlapMatrix& m) {
    return {{"communities", m.communities},
            {"counts", m.counts},
            {"diagonal", m.diagonal},
            {"edges", overlap_edge_list(m)}};
}

nlohmann::json overlap_edge_list(const OverlapMatrix& m) {
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t i = 0; i < m.communities.size(); ++i) {
        for (std::size_t j = i + 1; j < m.communities.size(); ++j) {
            if (m.counts[i][j] == 0) continue;
            edges.push_back({{"source", m.communities[i]},
                             {"target", m.communities[j]},
                             {"common_users", m.counts[i][j]}});
        }
    }
    return edges;
}

}  // namespace csakit
