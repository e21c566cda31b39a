#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "csakit/encoder.hpp"
#include "csakit/model.hpp"
#include "json.hpp"

namespace csakit {

// Binary probabilistic classifier over dense feature vectors.
class FeatureClassifier {
public:
    virtual ~FeatureClassifier() = default;
    virtual double probability(const Eigen::VectorXd& x) const = 0;
    virtual nlohmann::json to_json() const = 0;

    static std::unique_ptr<FeatureClassifier> from_json(const nlohmann::json& j);
};

// Labels are 0/1. Rows of X are samples.
std::unique_ptr<FeatureClassifier> fit_gaussian_nb(const Eigen::MatrixXd& x, std::span<const int> y);
std::unique_ptr<FeatureClassifier> fit_random_forest(const Eigen::MatrixXd& x, std::span<const int> y,
                                                     int n_trees, int max_depth, std::uint64_t seed);
std::unique_ptr<FeatureClassifier> fit_gradient_boosting(const Eigen::MatrixXd& x, std::span<const int> y,
                                                         int rounds, int max_depth, double learning_rate);

// Classical baseline over mean-pooled pretrained embeddings; one classifier
// per output (one-vs-rest for the multi-label stage).
class ClassicalModel final : public TextModel {
public:
    ClassicalModel(TaskKind task, Backend backend, PooledEmbedder embedder,
                   std::vector<std::unique_ptr<FeatureClassifier>> heads);

    TaskKind task() const override { return task_; }
    Backend backend() const override { return backend_; }
    std::vector<double> predict_proba(const std::string& text) const override;
    nlohmann::json to_json() const override;

    static std::unique_ptr<ClassicalModel> from_json(const nlohmann::json& j);

private:
    TaskKind task_;
    Backend backend_;
    PooledEmbedder embedder_;
    std::vector<std::unique_ptr<FeatureClassifier>> heads_;
};

std::unique_ptr<ClassicalModel> train_classical(std::span<const LabeledPost> train, TaskKind task,
                                                Backend backend, const TrainConfig& cfg);

}  // namespace csakit
