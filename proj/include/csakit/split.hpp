#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "csakit/corpus.hpp"
#include "csakit/model.hpp"

namespace csakit {

struct SplitSpec {
    double train_fraction = 0.8;
    // Validation share of the train portion; 1368 of 13674 in the reference run.
    double val_fraction_of_train = 1368.0 / 13674.0;
    std::uint64_t seed = 0;
    bool stratified = false;

    void validate() const;
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

// floor(n * train_fraction) posts go to train+val, the rest to test;
// val = round(train_portion * val_fraction_of_train).
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

struct SplitSets {
    std::vector<LabeledPost> train;
    std::vector<LabeledPost> val;
    std::vector<LabeledPost> test;
};

struct DataSplit {
    SplitSets stage1;  // drawn from both cohorts
    SplitSets stage2;  // with-CSA posts only
};

std::vector<LabeledPost> labeled_posts(const Corpus& corpus);

DataSplit split(const Corpus& with_csa, const Corpus& without_csa, const SplitSpec& spec);

// Layout: <dir>/split.json and <dir>/stage{1,2}/{train,val,test}.jsonl.
void write_split(const DataSplit& data, const SplitSpec& spec, const std::filesystem::path& dir);
DataSplit read_split(const std::filesystem::path& dir);
std::vector<LabeledPost> read_labeled_posts(const std::filesystem::path& path);
std::string labeled_posts_jsonl(const std::vector<LabeledPost>& posts);

}  // namespace csakit
