#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "csakit/corpus.hpp"
#include "json.hpp"

namespace csakit {

// Common-user counts between communities. counts[i][i] equals diagonal[i],
// the number of distinct authors in community i.
struct OverlapMatrix {
    std::vector<std::string> communities;
    std::vector<std::vector<std::size_t>> counts;
    std::vector<std::size_t> diagonal;

    std::size_t at(const std::string& a, const std::string& b) const;
};

OverlapMatrix overlap(const std::map<std::string, Corpus>& corpora);

// Same computation on explicit author-hash sets, in the given order.
OverlapMatrix overlap_authors(const std::vector<std::string>& names,
                              const std::vector<std::set<std::string>>& authors);

nlohmann::json overlap_to_json(const OverlapMatrix& m);
// Off-diagonal pairs with a nonzero count, i < j.
nlohmann::json overlap_edge_list(const OverlapMatrix& m);

}  // namespace csakit
