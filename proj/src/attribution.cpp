#include "csakit/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "csakit/corpus.hpp"
#include "csakit/errors.hpp"

namespace csakit {

using nlohmann::json;

json AttributionResult::to_json() const {
    return {{"document_id", document_id},
            {"tokens", tokens},
            {"scores", scores},
            {"target", target},
            {"target_index", target_index},
            {"baseline_kind", baseline_kind},
            {"steps", steps},
            {"output_at_input", output_at_input},
            {"output_at_baseline", output_at_baseline},
            {"completeness_gap", completeness_gap}};
}

AttributionResult integrated_gradients(const DifferentiableModel& model,
                                       const std::vector<std::string>& tokens,
                                       const Eigen::MatrixXd& input, const Eigen::MatrixXd& baseline,
                                       std::size_t target, int steps, RiemannRule rule) {
    if (steps < 1) throw ParameterError("integrated gradients needs at least one step");
    if (input.rows() != baseline.rows() || input.cols() != baseline.cols()) {
        throw ParameterError("input and baseline shapes differ");
    }
    const Eigen::MatrixXd delta = input - baseline;
    Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(input.rows(), input.cols());
    Eigen::MatrixXd grad(input.rows(), input.cols());
    const double offset = rule == RiemannRule::Midpoint ? 0.5 : 0.0;
    for (int k = 1; k <= steps; ++k) {
        const double alpha = (static_cast<double>(k) - offset) / steps;
        model.output(baseline + alpha * delta, target, &grad);
        grad_sum += grad;
    }
    const Eigen::MatrixXd attr = delta.cwiseProduct(grad_sum) / static_cast<double>(steps);

    AttributionResult r;
    r.tokens = tokens;
    r.scores.resize(static_cast<std::size_t>(input.rows()));
    for (Eigen::Index i = 0; i < input.rows(); ++i) r.scores[static_cast<std::size_t>(i)] = attr.row(i).sum();
    r.target_index = target;
    r.target = std::to_string(target);
    r.baseline_kind = model.baseline_kind();
    r.steps = steps;
    r.output_at_input = model.output(input, target, nullptr);
    r.output_at_baseline = model.output(baseline, target, nullptr);
    double total = 0.0;
    for (double s : r.scores) total += s;
    r.completeness_gap = std::abs(total - (r.output_at_input - r.output_at_baseline));
    return r;
}

AttributionResult integrated_gradients(const DifferentiableModel& model, const std::string& text,
                                       std::size_t target, int steps, RiemannRule rule) {
    const auto toks = model.tokens(text);
    const Eigen::MatrixXd x = model.embed(toks);
    return integrated_gradients(model, toks, x, model.baseline(toks.size()), target, steps, rule);
}

std::vector<AttributionResult> explain(const TextModel& model, const std::string& text, int steps,
                                       const std::vector<double>& thresholds, RiemannRule rule) {
    const DifferentiableModel* diff = model.differentiable();
    if (diff == nullptr) {
        throw UnsupportedBackend("backend " + std::string(to_string(model.backend())) +
                                 " has no input gradients");
    }
    const auto probs = model.predict_proba(text);
    std::vector<AttributionResult> out;
    if (model.task() == TaskKind::Binary) {
        const std::size_t cls = probs.at(1) >= 0.5 ? 1 : 0;
        auto r = integrated_gradients(*diff, text, cls, steps, rule);
        r.target = std::string(to_string(cls == 1 ? BackgroundTag::WithCsa : BackgroundTag::WithoutCsa));
        out.push_back(std::move(r));
        return out;
    }
    for (std::size_t i = 0; i < kAllConditions.size(); ++i) {
        const double tau = i < thresholds.size() ? thresholds[i] : 0.5;
        if (probs.at(i) < tau) continue;
        auto r = integrated_gradients(*diff, text, i, steps, rule);
        r.target = std::string(to_string(kAllConditions[i]));
        out.push_back(std::move(r));
    }
    return out;
}

// --------------------------------------------------------------- fixture

LinearFixture::LinearFixture(Eigen::MatrixXd weights, double bias, std::vector<std::string> vocab,
                             Eigen::MatrixXd embeddings)
    : weights_(std::move(weights)), bias_(bias), vocab_(std::move(vocab)), embeddings_(std::move(embeddings)) {
    if (embeddings_.rows() != static_cast<Eigen::Index>(vocab_.size()) || embeddings_.cols() != weights_.cols()) {
        throw ParameterError("linear fixture shapes disagree");
    }
}

std::vector<std::string> LinearFixture::tokens(const std::string& text) const {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text + " ") {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.size() > static_cast<std::size_t>(weights_.rows())) out.resize(static_cast<std::size_t>(weights_.rows()));
    return out;
}

Eigen::MatrixXd LinearFixture::embed(const std::vector<std::string>& tokens) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(tokens.size()), weights_.cols());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto it = std::find(vocab_.begin(), vocab_.end(), tokens[i]);
        if (it == vocab_.end()) throw InputError("token '" + tokens[i] + "' not in fixture vocabulary");
        x.row(static_cast<Eigen::Index>(i)) = embeddings_.row(it - vocab_.begin());
    }
    return x;
}

Eigen::MatrixXd LinearFixture::baseline(std::size_t length) const {
    return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(length), weights_.cols());
}

double LinearFixture::output(const Eigen::MatrixXd& x, std::size_t, Eigen::MatrixXd* grad) const {
    const auto w = weights_.topRows(x.rows());
    if (grad != nullptr) *grad = w;
    return x.cwiseProduct(w).sum() + bias_;
}

// ---------------------------------------------------------------- report

std::string attribution_color(double score, double max_abs) {
    if (max_abs <= 0.0 || score == 0.0) return "rgb(255,255,255)";
    const double t = std::clamp(std::abs(score) / max_abs, 0.0, 1.0);
    // Full saturation: green rgb(0,160,60), pink rgb(230,40,140).
    auto mix = [t](int full) { return static_cast<int>(std::lround(255.0 + (full - 255.0) * t)); };
    char buf[32];
    if (score > 0) {
        std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", mix(0), mix(160), mix(60));
    } else {
        std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", mix(230), mix(40), mix(140));
    }
    return buf;
}

namespace {

std::string escape_html(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void render_report(std::span<const AttributionResult> results, const std::filesystem::path& out) {
    std::string html =
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Token attributions</title>\n"
        "<style>body{font-family:sans-serif;max-width:60em;margin:2em auto}"
        ".doc{margin-bottom:1.5em;line-height:1.9}.tok{padding:1px 2px;border-radius:3px}"
        ".meta{color:#555;font-size:90%}</style></head><body>\n<h1>Token attributions</h1>\n";
    for (const auto& r : results) {
        double max_abs = 0.0;
        for (double s : r.scores) max_abs = std::max(max_abs, std::abs(s));
        html += "<div class=\"doc\"><div class=\"meta\">" + escape_html(r.document_id) + " target: " +
                escape_html(r.target) + " steps: " + std::to_string(r.steps) +
                " gap: " + escape_html(json(r.completeness_gap).dump()) + "</div>\n";
        for (std::size_t i = 0; i < r.tokens.size(); ++i) {
            html += "<span class=\"tok\" style=\"background:" + attribution_color(r.scores[i], max_abs) +
                    "\" title=\"" + escape_html(json(r.scores[i]).dump()) + "\">" + escape_html(r.tokens[i]) +
                    "</span> ";
        }
        html += "</div>\n";
    }
    json data = json::array();
    for (const auto& r : results) data.push_back(r.to_json());
    std::string payload = dump_json(data);
    // Keep the payload from closing the script element.
    for (std::size_t pos = 0; (pos = payload.find("</", pos)) != std::string::npos; pos += 3) {
        payload.replace(pos, 2, "<\\/");
    }
    html += "<script type=\"application/json\" id=\"attributions\">" + payload + "</script>\n</body></html>\n";
    write_text_file(out, html);
}

}  // namespace csakit
