#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>

#include "csakit/metrics.hpp"
#include "csakit/model.hpp"
#include "json.hpp"

namespace csakit {

std::unique_ptr<TextModel> train_stage1(std::span<const LabeledPost> train,
                                        std::span<const LabeledPost> val, Backend backend,
                                        const TrainConfig& cfg);
std::unique_ptr<TextModel> train_stage2(std::span<const LabeledPost> train,
                                        std::span<const LabeledPost> val, Backend backend,
                                        const TrainConfig& cfg);

struct CascadeModel {
    std::shared_ptr<const TextModel> stage1;
    std::shared_ptr<const TextModel> stage2;
    std::array<double, 3> thresholds{0.5, 0.5, 0.5};  // D/A/P
    nlohmann::json provenance = nlohmann::json::object();

    void validate() const;
};

struct CascadePrediction {
    BackgroundTag background = BackgroundTag::WithoutCsa;
    LabelSet conditions;
    double p_with_csa = 0.0;
    std::optional<std::array<double, 3>> label_probabilities;  // only when stage 2 ran
};

// Stage 1 says WITH_CSA when p_with >= 0.5; only then does stage 2 run and
// label l is emitted when p_l >= threshold_l.
CascadePrediction predict(const CascadeModel& model, const std::string& text);
LabelSet apply_thresholds(std::span<const double> probabilities, const std::array<double, 3>& thresholds);

struct EvalReport {
    int stage = 1;
    std::size_t samples = 0;
    double accuracy = 0.0;  // stage 2: exact-match ratio
    double macro_f1 = 0.0;
    std::optional<double> hamming_score;
    std::optional<double> hamming_loss;
    std::map<std::string, Prf> per_label;
    // Stage 1: 2x2 [true][pred] with 0 = without_csa. Stage 2: one row per
    // label in D/A/P order holding {tp, fp, fn, tn}.
    std::vector<std::vector<std::size_t>> confusion;

    nlohmann::json to_json() const;
};

EvalReport evaluate_stage1(const TextModel& model, std::span<const LabeledPost> test);
EvalReport evaluate_stage2(const TextModel& model, const std::array<double, 3>& thresholds,
                           std::span<const LabeledPost> test);

// Model directory: stage1.json, stage2.json, cascade.json (thresholds and
// provenance), metrics.json.
void save_stage(const std::filesystem::path& dir, int stage, const TextModel& model,
                const nlohmann::json& provenance);
CascadeModel load_cascade(const std::filesystem::path& dir);
std::string data_fingerprint(std::span<const LabeledPost> train, std::span<const LabeledPost> val);

}  // namespace csakit
