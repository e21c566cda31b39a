#include "csakit/metrics.hpp"

#include <algorithm>
#include <string>

#include "csakit/errors.hpp"

namespace csakit {

namespace {

template <typename T>
void check_lengths(std::span<const T> truth, std::span<const T> pred) {
    if (truth.size() != pred.size()) {
        throw MetricError("length mismatch: " + std::to_string(truth.size()) + " truths vs " +
                          std::to_string(pred.size()) + " predictions");
    }
    if (truth.empty()) throw MetricError("metrics need at least one sample");
}

}  // namespace

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    Prf out;
    const double dtp = static_cast<double>(tp);
    if (tp + fp > 0) out.precision = dtp / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = dtp / static_cast<double>(tp + fn);
    if (tp > 0) out.f1 = 2.0 * dtp / static_cast<double>(2 * tp + fp + fn);
    return out;
}

double accuracy(std::span<const int> truth, std::span<const int> pred) {
    check_lengths(truth, pred);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<std::vector<std::size_t>> confusion_matrix(std::span<const int> truth,
                                                       std::span<const int> pred,
                                                       int num_classes) {
    check_lengths(truth, pred);
    const auto k = static_cast<std::size_t>(num_classes);
    std::vector<std::vector<std::size_t>> m(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= num_classes || pred[i] < 0 || pred[i] >= num_classes) {
            throw MetricError("class id out of range");
        }
        ++m[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
    }
    return m;
}

double macro_f1(std::span<const int> truth, std::span<const int> pred, int num_classes) {
    const auto m = confusion_matrix(truth, pred, num_classes);
    const auto k = m.size();
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            fp += m[o][c];
            fn += m[c][o];
        }
        sum += prf_from_counts(m[c][c], fp, fn).f1;
    }
    return sum / static_cast<double>(k);
}

double hamming_score(std::span<const LabelSet> truth, std::span<const LabelSet> pred) {
    check_lengths(truth, pred);
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& t = truth[i];
        const auto& p = pred[i];
        if (t.empty() && p.empty()) {
            sum += 1.0;
            continue;
        }
        std::size_t inter = 0;
        for (auto l : t) inter += p.contains(l) ? 1 : 0;
        const std::size_t uni = t.size() + p.size() - inter;
        sum += static_cast<double>(inter) / static_cast<double>(uni);
    }
    return sum / static_cast<double>(truth.size());
}

double hamming_loss(std::span<const LabelSet> truth, std::span<const LabelSet> pred) {
    check_lengths(truth, pred);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (auto l : kAllConditions) wrong += truth[i].contains(l) != pred[i].contains(l) ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(truth.size() * kAllConditions.size());
}

double subset_accuracy(std::span<const LabelSet> truth, std::span<const LabelSet> pred) {
    check_lengths(truth, pred);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace csakit
