#include "csakit/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "csakit/errors.hpp"
#include "csakit/rng.hpp"

namespace csakit {

using nlohmann::json;

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// ------------------------------------------------------------- naive Bayes

class GaussianNb final : public FeatureClassifier {
public:
    std::array<double, 2> log_prior{};
    std::array<Eigen::VectorXd, 2> mean;
    std::array<Eigen::VectorXd, 2> var;
    std::array<bool, 2> present{};

    double probability(const Eigen::VectorXd& x) const override {
        if (!present[0]) return 1.0;
        if (!present[1]) return 0.0;
        std::array<double, 2> joint{};
        for (int c = 0; c < 2; ++c) {
            const auto diff = (x - mean[c]).array();
            joint[c] = log_prior[c] -
                       0.5 * ((2.0 * M_PI * var[c].array()).log() + diff.square() / var[c].array()).sum();
        }
        return sigmoid(joint[1] - joint[0]);
    }

    json to_json() const override {
        json j{{"kind", "gaussian_nb"}, {"log_prior", log_prior}, {"present", present}};
        for (int c = 0; c < 2; ++c) {
            j["mean"].push_back(vector_to_json(mean[c]));
            j["var"].push_back(vector_to_json(var[c]));
        }
        return j;
    }
};

// ------------------------------------------------------------------- trees

struct TreeNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const Eigen::VectorXd& x) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& n = nodes[static_cast<std::size_t>(i)];
            i = x(n.feature) <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    json to_json() const {
        json f = json::array(), t = json::array(), l = json::array(), r = json::array(), v = json::array();
        for (const auto& n : nodes) {
            f.push_back(n.feature);
            t.push_back(n.threshold);
            l.push_back(n.left);
            r.push_back(n.right);
            v.push_back(n.value);
        }
        return {{"feature", f}, {"threshold", t}, {"left", l}, {"right", r}, {"value", v}};
    }

    static Tree from_json(const json& j) {
        Tree tree;
        const auto f = j.at("feature").get<std::vector<int>>();
        const auto t = j.at("threshold").get<std::vector<double>>();
        const auto l = j.at("left").get<std::vector<int>>();
        const auto r = j.at("right").get<std::vector<int>>();
        const auto v = j.at("value").get<std::vector<double>>();
        for (std::size_t i = 0; i < f.size(); ++i) tree.nodes.push_back({f[i], t[i], l[i], r[i], v[i]});
        return tree;
    }
};

// Exhaustive threshold search shared by both tree kinds; `gain` rates a
// candidate partition from left/right sufficient statistics.
struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

template <typename Stats, typename Accumulate, typename Gain>
SplitChoice best_split(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows,
                       const std::vector<int>& features, Accumulate accumulate, Gain gain) {
    SplitChoice best;
    std::vector<std::size_t> sorted = rows;
    for (int f : features) {
        std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
            if (x(static_cast<Eigen::Index>(a), f) != x(static_cast<Eigen::Index>(b), f)) {
                return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
            }
            return a < b;
        });
        Stats total{};
        for (auto r : sorted) accumulate(total, r, 1.0);
        Stats left{};
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            accumulate(left, sorted[i], 1.0);
            const double here = x(static_cast<Eigen::Index>(sorted[i]), f);
            const double next = x(static_cast<Eigen::Index>(sorted[i + 1]), f);
            if (here == next) continue;
            const Stats right = total - left;
            const double g = gain(left, right, total);
            if (g > best.gain + 1e-12) {
                best = {f, 0.5 * (here + next), g};
            }
        }
    }
    return best;
}

struct ClassStats {
    double n = 0.0;
    double pos = 0.0;
    ClassStats operator-(const ClassStats& o) const { return {n - o.n, pos - o.pos}; }
};

double gini(const ClassStats& s) {
    if (s.n <= 0.0) return 0.0;
    const double p = s.pos / s.n;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

void grow_classification_tree(Tree& tree, int node, const Eigen::MatrixXd& x, std::span<const int> y,
                              const std::vector<std::size_t>& rows, int depth, int max_depth,
                              int mtry, Rng& rng) {
    ClassStats total{};
    for (auto r : rows) {
        total.n += 1.0;
        total.pos += y[r];
    }
    tree.nodes[static_cast<std::size_t>(node)].value = total.pos / total.n;
    if (total.pos == 0.0 || total.pos == total.n || rows.size() < 2 ||
        (max_depth > 0 && depth >= max_depth)) {
        return;
    }
    std::vector<int> all(static_cast<std::size_t>(x.cols()));
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    all.resize(static_cast<std::size_t>(mtry));
    std::sort(all.begin(), all.end());
    const double parent = gini(total);
    auto split = best_split<ClassStats>(
        x, rows, all,
        [&](ClassStats& s, std::size_t r, double w) {
            s.n += w;
            s.pos += w * y[r];
        },
        [&](const ClassStats& l, const ClassStats& r, const ClassStats& t) {
            return parent - (l.n / t.n) * gini(l) - (r.n / t.n) * gini(r);
        });
    if (split.feature < 0) return;
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
        (x(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& n = tree.nodes[static_cast<std::size_t>(node)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = left;
    n.right = right;
    grow_classification_tree(tree, left, x, y, left_rows, depth + 1, max_depth, mtry, rng);
    grow_classification_tree(tree, right, x, y, right_rows, depth + 1, max_depth, mtry, rng);
}

class RandomForest final : public FeatureClassifier {
public:
    std::vector<Tree> trees;

    double probability(const Eigen::VectorXd& x) const override {
        double sum = 0.0;
        for (const auto& t : trees) sum += t.predict(x);
        return sum / static_cast<double>(trees.size());
    }

    json to_json() const override {
        json arr = json::array();
        for (const auto& t : trees) arr.push_back(t.to_json());
        return {{"kind", "random_forest"}, {"trees", arr}};
    }
};

struct GradStats {
    double g = 0.0;
    double h = 0.0;
    GradStats operator-(const GradStats& o) const { return {g - o.g, h - o.h}; }
};

constexpr double kLambda = 1.0;

void grow_regression_tree(Tree& tree, int node, const Eigen::MatrixXd& x, const std::vector<double>& grad,
                          const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                          int depth, int max_depth, const std::vector<int>& features) {
    GradStats total{};
    for (auto r : rows) {
        total.g += grad[r];
        total.h += hess[r];
    }
    tree.nodes[static_cast<std::size_t>(node)].value = -total.g / (total.h + kLambda);
    if (depth >= max_depth || rows.size() < 2) return;
    auto score = [](const GradStats& s) { return s.g * s.g / (s.h + kLambda); };
    auto split = best_split<GradStats>(
        x, rows, features,
        [&](GradStats& s, std::size_t r, double w) {
            s.g += w * grad[r];
            s.h += w * hess[r];
        },
        [&](const GradStats& l, const GradStats& r, const GradStats& t) {
            if (l.h < 1e-3 || r.h < 1e-3) return 0.0;
            return 0.5 * (score(l) + score(r) - score(t));
        });
    if (split.feature < 0) return;
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
        (x(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& n = tree.nodes[static_cast<std::size_t>(node)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = left;
    n.right = right;
    grow_regression_tree(tree, left, x, grad, hess, left_rows, depth + 1, max_depth, features);
    grow_regression_tree(tree, right, x, grad, hess, right_rows, depth + 1, max_depth, features);
}

class GradientBoosting final : public FeatureClassifier {
public:
    double base = 0.0;
    double learning_rate = 0.1;
    std::vector<Tree> trees;

    double margin(const Eigen::VectorXd& x) const {
        double f = base;
        for (const auto& t : trees) f += learning_rate * t.predict(x);
        return f;
    }

    double probability(const Eigen::VectorXd& x) const override { return sigmoid(margin(x)); }

    json to_json() const override {
        json arr = json::array();
        for (const auto& t : trees) arr.push_back(t.to_json());
        return {{"kind", "gradient_boosting"}, {"base", base}, {"learning_rate", learning_rate}, {"trees", arr}};
    }
};

void check_xy(const Eigen::MatrixXd& x, std::span<const int> y) {
    if (x.rows() == 0) throw InputError("classical model needs at least one training sample");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw InputError("feature/label count mismatch");
}

}  // namespace

std::unique_ptr<FeatureClassifier> fit_gaussian_nb(const Eigen::MatrixXd& x, std::span<const int> y) {
    check_xy(x, y);
    auto nb = std::make_unique<GaussianNb>();
    const auto d = x.cols();
    double max_var = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
        const double m = x.col(c).mean();
        max_var = std::max(max_var, (x.col(c).array() - m).square().mean());
    }
    const double epsilon = 1e-9 * std::max(max_var, 1e-12);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == cls) idx.push_back(static_cast<Eigen::Index>(i));
        }
        nb->present[static_cast<std::size_t>(cls)] = !idx.empty();
        nb->mean[static_cast<std::size_t>(cls)] = Eigen::VectorXd::Zero(d);
        nb->var[static_cast<std::size_t>(cls)] = Eigen::VectorXd::Constant(d, epsilon);
        if (idx.empty()) continue;
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(idx.size()), d);
        for (std::size_t i = 0; i < idx.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
        const Eigen::VectorXd mean = sub.colwise().mean().transpose();
        nb->mean[static_cast<std::size_t>(cls)] = mean;
        nb->var[static_cast<std::size_t>(cls)] =
            ((sub.rowwise() - mean.transpose()).array().square().colwise().mean().transpose() + epsilon).matrix();
        nb->log_prior[static_cast<std::size_t>(cls)] =
            std::log(static_cast<double>(idx.size()) / static_cast<double>(y.size()));
    }
    return nb;
}

std::unique_ptr<FeatureClassifier> fit_random_forest(const Eigen::MatrixXd& x, std::span<const int> y,
                                                     int n_trees, int max_depth, std::uint64_t seed) {
    check_xy(x, y);
    auto forest = std::make_unique<RandomForest>();
    Rng rng(seed);
    const int mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    const auto n = static_cast<std::size_t>(x.rows());
    for (int t = 0; t < std::max(1, n_trees); ++t) {
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = rng.index(n);
        Tree tree;
        tree.nodes.emplace_back();
        grow_classification_tree(tree, 0, x, y, rows, 0, max_depth, mtry, rng);
        forest->trees.push_back(std::move(tree));
    }
    return forest;
}

std::unique_ptr<FeatureClassifier> fit_gradient_boosting(const Eigen::MatrixXd& x, std::span<const int> y,
                                                         int rounds, int max_depth, double learning_rate) {
    check_xy(x, y);
    auto gb = std::make_unique<GradientBoosting>();
    gb->learning_rate = learning_rate;
    const auto n = static_cast<std::size_t>(x.rows());
    double pos = 0.0;
    for (int v : y) pos += v;
    const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    gb->base = std::log(prior / (1.0 - prior));
    std::vector<double> f(n, gb->base);
    std::vector<double> grad(n), hess(n);
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<int> features(static_cast<std::size_t>(x.cols()));
    std::iota(features.begin(), features.end(), 0);
    for (int round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(f[i]);
            grad[i] = p - y[i];
            hess[i] = std::max(p * (1.0 - p), 1e-12);
        }
        Tree tree;
        tree.nodes.emplace_back();
        grow_regression_tree(tree, 0, x, grad, hess, rows, 0, max_depth, features);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] += learning_rate * tree.predict(x.row(static_cast<Eigen::Index>(i)).transpose());
        }
        gb->trees.push_back(std::move(tree));
    }
    return gb;
}

std::unique_ptr<FeatureClassifier> FeatureClassifier::from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian_nb") {
        auto nb = std::make_unique<GaussianNb>();
        nb->log_prior = j.at("log_prior").get<std::array<double, 2>>();
        nb->present = j.at("present").get<std::array<bool, 2>>();
        for (std::size_t c = 0; c < 2; ++c) {
            nb->mean[c] = vector_from_json(j.at("mean").at(c));
            nb->var[c] = vector_from_json(j.at("var").at(c));
        }
        return nb;
    }
    if (kind == "random_forest") {
        auto rf = std::make_unique<RandomForest>();
        for (const auto& t : j.at("trees")) rf->trees.push_back(Tree::from_json(t));
        return rf;
    }
    if (kind == "gradient_boosting") {
        auto gb = std::make_unique<GradientBoosting>();
        gb->base = j.at("base").get<double>();
        gb->learning_rate = j.at("learning_rate").get<double>();
        for (const auto& t : j.at("trees")) gb->trees.push_back(Tree::from_json(t));
        return gb;
    }
    throw InputError("unknown classifier kind " + kind);
}

// ----------------------------------------------------------- ClassicalModel

ClassicalModel::ClassicalModel(TaskKind task, Backend backend, PooledEmbedder embedder,
                               std::vector<std::unique_ptr<FeatureClassifier>> heads)
    : task_(task), backend_(backend), embedder_(std::move(embedder)), heads_(std::move(heads)) {}

std::vector<double> ClassicalModel::predict_proba(const std::string& text) const {
    const Eigen::VectorXd features = embedder_.features(text);
    if (task_ == TaskKind::Binary) {
        const double p = heads_.front()->probability(features);
        return {1.0 - p, p};
    }
    std::vector<double> out;
    for (const auto& h : heads_) out.push_back(h->probability(features));
    return out;
}

json ClassicalModel::to_json() const {
    json heads = json::array();
    for (const auto& h : heads_) heads.push_back(h->to_json());
    return {{"kind", "classical"},
            {"task", task_ == TaskKind::Binary ? "binary" : "multilabel"},
            {"backend", std::string(to_string(backend_))},
            {"embedder", embedder_.to_json()},
            {"heads", heads}};
}

std::unique_ptr<ClassicalModel> ClassicalModel::from_json(const json& j) {
    std::vector<std::unique_ptr<FeatureClassifier>> heads;
    for (const auto& h : j.at("heads")) heads.push_back(FeatureClassifier::from_json(h));
    const TaskKind task = j.at("task").get<std::string>() == "binary" ? TaskKind::Binary : TaskKind::MultiLabel;
    return std::make_unique<ClassicalModel>(task, parse_backend(j.at("backend").get<std::string>()),
                                            PooledEmbedder::from_json(j.at("embedder")), std::move(heads));
}

std::unique_ptr<ClassicalModel> train_classical(std::span<const LabeledPost> train, TaskKind task,
                                                Backend backend, const TrainConfig& cfg) {
    if (train.empty()) throw InputError("training set is empty");
    std::vector<std::string> texts;
    texts.reserve(train.size());
    for (const auto& p : train) texts.push_back(p.text());
    PooledEmbedder embedder = PooledEmbedder::build(texts, cfg);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(train.size()), embedder.table.cols());
    for (std::size_t i = 0; i < train.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = embedder.features(texts[i]).transpose();
    }
    const std::size_t outputs = task == TaskKind::Binary ? 1 : kAllConditions.size();
    std::vector<std::unique_ptr<FeatureClassifier>> heads;
    for (std::size_t o = 0; o < outputs; ++o) {
        std::vector<int> y;
        y.reserve(train.size());
        for (const auto& p : train) {
            y.push_back(task == TaskKind::Binary ? (p.background == BackgroundTag::WithCsa ? 1 : 0)
                                                 : (p.labels.contains(kAllConditions[o]) ? 1 : 0));
        }
        const std::uint64_t seed = derive_seed(cfg.seed, "train/forest/" + std::to_string(o));
        switch (backend) {
            case Backend::NaiveBayes: heads.push_back(fit_gaussian_nb(x, y)); break;
            case Backend::RandomForest:
                heads.push_back(fit_random_forest(x, y, cfg.n_trees, cfg.max_depth, seed));
                break;
            case Backend::GradientBoostedTrees:
                heads.push_back(fit_gradient_boosting(x, y, cfg.boosting_rounds,
                                                      cfg.max_depth > 0 ? cfg.max_depth : 3,
                                                      cfg.boosting_learning_rate));
                break;
            default: throw UnsupportedBackend("train_classical needs a classical backend");
        }
    }
    return std::make_unique<ClassicalModel>(task, backend, std::move(embedder), std::move(heads));
}

}  // namespace csakit
