#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "csakit/model.hpp"
#include "json.hpp"

namespace csakit {

class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    // Tokens ordered by descending frequency, ties by token; ids 0/1 are
    // reserved for [PAD]/[UNK].
    static Vocabulary build(std::span<const std::vector<std::string>> docs, std::size_t max_size);

    int id(const std::string& token) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return tokens_.size(); }
    std::vector<int> encode(const std::vector<std::string>& tokens) const;

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Encoder tokenization: lowercase word tokens truncated from the head.
std::vector<std::string> encoder_tokens(const std::string& text, int max_tokens);

// Word vectors from positive PMI co-occurrence statistics reduced to `dim`
// dimensions by a truncated symmetric eigendecomposition. Only the
// `max_rows` most frequent ids get pretrained rows; the rest are random.
// Row 0 ([PAD]) is zero.
Eigen::MatrixXd pretrain_embeddings(std::size_t vocab_size, std::span<const std::vector<int>> sequences,
                                    int dim, std::uint64_t seed, int window = 5,
                                    std::size_t max_rows = 2000);

// Mean-pooled pretrained word vectors; the shared representation for the
// classical baselines.
struct PooledEmbedder {
    Vocabulary vocab;
    Eigen::MatrixXd table;
    int max_tokens = 512;

    static PooledEmbedder build(std::span<const std::string> texts, const TrainConfig& cfg);
    Eigen::VectorXd features(const std::string& text) const;

    nlohmann::json to_json() const;
    static PooledEmbedder from_json(const nlohmann::json& j);
};

// Token embeddings -> tanh projection -> attention pooling -> linear head.
struct EncoderParams {
    Eigen::MatrixXd embedding;  // V x d
    Eigen::MatrixXd w1;         // H x d
    Eigen::VectorXd b1;         // H
    Eigen::VectorXd attention;  // H
    Eigen::MatrixXd head;       // K x H
    Eigen::VectorXd head_bias;  // K

    static EncoderParams init(std::size_t vocab, int dim, int hidden, std::size_t outputs, std::uint64_t seed);
    EncoderParams zeros_like() const;
};

struct EncoderForward {
    Eigen::MatrixXd x;      // L x d
    Eigen::MatrixXd h;      // L x H
    Eigen::VectorXd alpha;  // L
    Eigen::VectorXd pooled; // H
    Eigen::VectorXd logits; // K
};

EncoderForward encoder_forward(const EncoderParams& p, const Eigen::MatrixXd& x);
// Backpropagates dL/dlogits. Accumulates parameter gradients into `grads`
// (when non-null, embedding rows excluded) and returns dL/dx.
Eigen::MatrixXd encoder_backward(const EncoderParams& p, const EncoderForward& fwd,
                                 const Eigen::VectorXd& dlogits, EncoderParams* grads);

class EncoderModel final : public TextModel, public DifferentiableModel {
public:
    EncoderModel(TaskKind task, Backend backend, Vocabulary vocab, EncoderParams params,
                 int max_tokens);

    TaskKind task() const override { return task_; }
    Backend backend() const override { return backend_; }
    std::vector<double> predict_proba(const std::string& text) const override;
    nlohmann::json to_json() const override;
    const DifferentiableModel* differentiable() const override { return this; }

    std::vector<std::string> tokens(const std::string& text) const override;
    Eigen::MatrixXd embed(const std::vector<std::string>& tokens) const override;
    Eigen::MatrixXd baseline(std::size_t length) const override;
    std::string baseline_kind() const override { return "pad-embedding"; }
    double output(const Eigen::MatrixXd& x, std::size_t target, Eigen::MatrixXd* grad) const override;

    Eigen::VectorXd logits(const std::string& text) const;
    const EncoderParams& params() const { return params_; }
    const Vocabulary& vocab() const { return vocab_; }

    static std::unique_ptr<EncoderModel> from_json(const nlohmann::json& j);

private:
    TaskKind task_;
    Backend backend_;
    Vocabulary vocab_;
    EncoderParams params_;
    int max_tokens_;
};

// Trains every weight (embeddings included) with AdamW; keeps the epoch with
// the best validation score (macro-F1 for Binary, hamming score for MultiLabel).
std::unique_ptr<EncoderModel> train_encoder(std::span<const LabeledPost> train,
                                            std::span<const LabeledPost> val, TaskKind task,
                                            Backend backend, const TrainConfig& cfg);

// Targets in output order: {without, with} one-hot for Binary, D/A/P multi-hot otherwise.
Eigen::VectorXd target_vector(const LabeledPost& post, TaskKind task);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace csakit
