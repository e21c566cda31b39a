#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csakit/corpus.hpp"
#include "json.hpp"

namespace csakit {

// A post with the supervision both stages need.
struct LabeledPost {
    Post post;
    BackgroundTag background = BackgroundTag::WithCsa;
    LabelSet labels;

    std::string text() const { return post.canonical_text(); }
};

// Stage 1 is a two-way softmax over {WITHOUT_CSA, WITH_CSA};
// stage 2 is three independent sigmoids in D/A/P order.
enum class TaskKind { Binary, MultiLabel };

inline std::size_t output_dim(TaskKind task) { return task == TaskKind::Binary ? 2 : 3; }

enum class Backend { GeneralEncoder, DomainEncoder, NaiveBayes, RandomForest, GradientBoostedTrees };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

struct TrainConfig {
    int epochs = 10;
    int batch_size = 8;
    double learning_rate = 5e-5;
    int max_sequence_tokens = 512;
    std::uint64_t seed = 0;
    // Encoder shape and optimizer.
    int embedding_dim = 32;
    int hidden_dim = 32;
    double weight_decay = 0.01;
    int max_vocab = 30000;
    // Classical baselines.
    int n_trees = 100;
    int max_depth = 0;  // 0 = unlimited (random forest); boosting uses 3 when 0
    int boosting_rounds = 100;
    double boosting_learning_rate = 0.1;

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// Parses `key = value` lines (TOML subset: comments with '#', optional quotes).
TrainConfig parse_train_config(std::string_view text);
TrainConfig load_train_config(const std::filesystem::path& path);

// Gradient access to a model whose input is a sequence of token embeddings.
class DifferentiableModel {
public:
    virtual ~DifferentiableModel() = default;

    virtual std::vector<std::string> tokens(const std::string& text) const = 0;
    // One row per token.
    virtual Eigen::MatrixXd embed(const std::vector<std::string>& tokens) const = 0;
    // Reference input of the same shape (padding-token embeddings).
    virtual Eigen::MatrixXd baseline(std::size_t length) const = 0;
    virtual std::string baseline_kind() const = 0;
    // Output `target` at input x; fills grad (same shape as x) when non-null.
    virtual double output(const Eigen::MatrixXd& x, std::size_t target,
                          Eigen::MatrixXd* grad) const = 0;
};

// Trained classifier for one stage.
class TextModel {
public:
    virtual ~TextModel() = default;

    virtual TaskKind task() const = 0;
    virtual Backend backend() const = 0;
    // Binary: class probabilities {p_without, p_with}. MultiLabel: per-label
    // sigmoid probabilities in D/A/P order.
    virtual std::vector<double> predict_proba(const std::string& text) const = 0;
    virtual nlohmann::json to_json() const = 0;
    // nullptr for backends without input gradients (tree ensembles, NB).
    virtual const DifferentiableModel* differentiable() const { return nullptr; }
};

std::unique_ptr<TextModel> text_model_from_json(const nlohmann::json& j);

}  // namespace csakit
