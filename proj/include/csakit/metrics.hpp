#pragma once

#include <span>
#include <vector>

#include "csakit/corpus.hpp"

namespace csakit {

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Zero when the denominator is zero.
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

// Class ids are 0..num_classes-1; every id participates in the macro mean
// whether or not it occurs.
double accuracy(std::span<const int> truth, std::span<const int> pred);
double macro_f1(std::span<const int> truth, std::span<const int> pred, int num_classes = 2);
std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> truth,
                                                       std::span<const int> pred,
                                                       int num_classes = 2);

// Mean per-sample |T ∩ P| / |T ∪ P|, 1 when both sets are empty.
double hamming_score(std::span<const LabelSet> truth, std::span<const LabelSet> pred);
// Fraction of (sample, label) slots predicted wrongly.
double hamming_loss(std::span<const LabelSet> truth, std::span<const LabelSet> pred);
double subset_accuracy(std::span<const LabelSet> truth, std::span<const LabelSet> pred);

}  // namespace csakit
