#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csakit/model.hpp"
#include "json.hpp"

namespace csakit {

enum class RiemannRule { Midpoint, Right };

struct AttributionResult {
    std::string document_id;
    std::vector<std::string> tokens;
    std::vector<double> scores;  // one per token, summed over embedding dimensions
    std::string target;          // class or label name
    std::size_t target_index = 0;
    std::string baseline_kind;
    int steps = 0;
    double output_at_input = 0.0;
    double output_at_baseline = 0.0;
    double completeness_gap = 0.0;  // |sum(scores) - (F(x) - F(x'))|

    nlohmann::json to_json() const;
};

// Integrated gradients along the straight line from baseline to input.
AttributionResult integrated_gradients(const DifferentiableModel& model, const std::string& text,
                                       std::size_t target, int steps,
                                       RiemannRule rule = RiemannRule::Midpoint);
// Same, on an explicit input and baseline (rows = tokens).
AttributionResult integrated_gradients(const DifferentiableModel& model,
                                       const std::vector<std::string>& tokens,
                                       const Eigen::MatrixXd& input, const Eigen::MatrixXd& baseline,
                                       std::size_t target, int steps, RiemannRule rule);

// Stage 1 explains the predicted class; stage 2 yields one result per
// predicted label (none when nothing clears its threshold).
std::vector<AttributionResult> explain(const TextModel& model, const std::string& text, int steps,
                                       const std::vector<double>& thresholds = {0.5, 0.5, 0.5},
                                       RiemannRule rule = RiemannRule::Midpoint);

// F(x) = w . vec(x) + bias with x of shape rows x cols.
class LinearFixture final : public DifferentiableModel {
public:
    LinearFixture(Eigen::MatrixXd weights, double bias, std::vector<std::string> vocab,
                  Eigen::MatrixXd embeddings);

    std::vector<std::string> tokens(const std::string& text) const override;
    Eigen::MatrixXd embed(const std::vector<std::string>& tokens) const override;
    Eigen::MatrixXd baseline(std::size_t length) const override;
    std::string baseline_kind() const override { return "zero"; }
    double output(const Eigen::MatrixXd& x, std::size_t target, Eigen::MatrixXd* grad) const override;

private:
    Eigen::MatrixXd weights_;
    double bias_;
    std::vector<std::string> vocab_;
    Eigen::MatrixXd embeddings_;
};

// Background colour for a score given the document's max |score|.
std::string attribution_color(double score, double max_abs);

void render_report(std::span<const AttributionResult> results, const std::filesystem::path& out);

}  // namespace csakit
