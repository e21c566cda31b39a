#include "csakit/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "csakit/errors.hpp"
#include "csakit/metrics.hpp"
#include "csakit/rng.hpp"
#include "csakit/text.hpp"

namespace csakit {

using nlohmann::json;

// ---------------------------------------------------------------- vocabulary

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> docs, std::size_t max_size) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : docs) {
        for (const auto& t : doc) ++counts[t];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    v.tokens_ = {"[PAD]", "[UNK]"};
    for (const auto& [token, _] : ranked) {
        if (v.tokens_.size() >= std::max<std::size_t>(max_size, 2)) break;
        v.tokens_.push_back(token);
    }
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) v.index_[v.tokens_[i]] = static_cast<int>(i);
    return v;
}

int Vocabulary::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    if (ids.empty()) ids.push_back(kUnk);
    return ids;
}

json Vocabulary::to_json() const { return tokens_; }

Vocabulary Vocabulary::from_json(const json& j) {
    Vocabulary v;
    v.tokens_ = j.get<std::vector<std::string>>();
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) v.index_[v.tokens_[i]] = static_cast<int>(i);
    return v;
}

std::vector<std::string> encoder_tokens(const std::string& text, int max_tokens) {
    auto tokens = simple_tokens(text);
    if (max_tokens > 0 && tokens.size() > static_cast<std::size_t>(max_tokens)) {
        tokens.resize(static_cast<std::size_t>(max_tokens));
    }
    return tokens;
}

// ------------------------------------------------------------ serialization

json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw InputError("matrix size mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

// --------------------------------------------------------------- pretraining

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal() * stddev;
    }
    return m;
}

double mean_row_norm(const Eigen::MatrixXd& m, Eigen::Index first_row) {
    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index r = first_row; r < m.rows(); ++r) {
        sum += m.row(r).norm();
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

Eigen::MatrixXd pretrain_embeddings(std::size_t vocab_size, std::span<const std::vector<int>> sequences,
                                    int dim, std::uint64_t seed, int window, std::size_t max_rows) {
    Rng rng(seed);
    const auto V = static_cast<Eigen::Index>(vocab_size);
    const double init_std = 1.0 / std::sqrt(static_cast<double>(dim));
    Eigen::MatrixXd table = random_matrix(V, dim, init_std, rng);
    table.row(Vocabulary::kPad).setZero();

    // Rows 2..R-1 (frequent tokens) take part in the co-occurrence model.
    const auto R = static_cast<Eigen::Index>(std::min(vocab_size, max_rows + 2));
    if (R <= 3) return table;
    Eigen::MatrixXd cooc = Eigen::MatrixXd::Zero(R, R);
    for (const auto& seq : sequences) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i] < 2 || seq[i] >= R) continue;
            const std::size_t end = std::min(seq.size(), i + 1 + static_cast<std::size_t>(window));
            for (std::size_t j = i + 1; j < end; ++j) {
                if (seq[j] < 2 || seq[j] >= R) continue;
                cooc(seq[i], seq[j]) += 1.0;
                cooc(seq[j], seq[i]) += 1.0;
            }
        }
    }
    const Eigen::VectorXd row_sum = cooc.rowwise().sum();
    const double total = row_sum.sum();
    if (total <= 0.0) return table;
    Eigen::MatrixXd ppmi = Eigen::MatrixXd::Zero(R, R);
    for (Eigen::Index i = 0; i < R; ++i) {
        for (Eigen::Index j = 0; j < R; ++j) {
            if (cooc(i, j) <= 0.0) continue;
            const double pmi = std::log(cooc(i, j) * total / (row_sum(i) * row_sum(j)));
            if (pmi > 0.0) ppmi(i, j) = pmi;
        }
    }

    // Truncated eigendecomposition: direct for small R, subspace iteration otherwise.
    Eigen::MatrixXd basis;
    Eigen::VectorXd eigenvalues;
    const Eigen::Index k = std::min<Eigen::Index>(R, dim + 8);
    if (R <= 400) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(ppmi);
        basis = solver.eigenvectors();
        eigenvalues = solver.eigenvalues();
    } else {
        Eigen::MatrixXd y = ppmi * random_matrix(R, k, 1.0, rng);
        Eigen::MatrixXd q;
        for (int it = 0; it < 6; ++it) {
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
            q = qr.householderQ() * Eigen::MatrixXd::Identity(R, k);
            y = ppmi * q;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q.transpose() * ppmi * q);
        basis = q * solver.eigenvectors();
        eigenvalues = solver.eigenvalues();
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(eigenvalues.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(eigenvalues(a)) > std::abs(eigenvalues(b));
    });
    Eigen::MatrixXd pretrained = Eigen::MatrixXd::Zero(R, dim);
    const Eigen::Index used = std::min<Eigen::Index>(dim, static_cast<Eigen::Index>(order.size()));
    for (Eigen::Index c = 0; c < used; ++c) {
        const Eigen::Index src = order[static_cast<std::size_t>(c)];
        // Fix the sign so the decomposition is reproducible across solvers.
        Eigen::VectorXd col = basis.col(src);
        Eigen::Index argmax = 0;
        col.cwiseAbs().maxCoeff(&argmax);
        if (col(argmax) < 0) col = -col;
        pretrained.col(c) = col * std::sqrt(std::abs(eigenvalues(src)));
    }
    const double target = mean_row_norm(table, 2);
    const double have = mean_row_norm(pretrained.bottomRows(R - 2), 0);
    if (have > 0.0) pretrained *= target / have;
    for (Eigen::Index r = 2; r < R; ++r) {
        if (pretrained.row(r).norm() > 0.0) table.row(r) = pretrained.row(r);
    }
    return table;
}

PooledEmbedder PooledEmbedder::build(std::span<const std::string> texts, const TrainConfig& cfg) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(encoder_tokens(t, cfg.max_sequence_tokens));
    PooledEmbedder e;
    e.vocab = Vocabulary::build(docs, static_cast<std::size_t>(cfg.max_vocab));
    e.max_tokens = cfg.max_sequence_tokens;
    std::vector<std::vector<int>> seqs;
    seqs.reserve(docs.size());
    for (const auto& d : docs) seqs.push_back(e.vocab.encode(d));
    e.table = pretrain_embeddings(e.vocab.size(), seqs, cfg.embedding_dim,
                                  derive_seed(cfg.seed, "train/pretrain"));
    return e;
}

Eigen::VectorXd PooledEmbedder::features(const std::string& text) const {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.cols());
    int n = 0;
    for (int id : vocab.encode(encoder_tokens(text, max_tokens))) {
        if (id == Vocabulary::kUnk || id == Vocabulary::kPad) continue;
        sum += table.row(id).transpose();
        ++n;
    }
    if (n > 0) sum /= static_cast<double>(n);
    return sum;
}

json PooledEmbedder::to_json() const {
    return {{"vocab", vocab.to_json()}, {"table", matrix_to_json(table)}, {"max_tokens", max_tokens}};
}

PooledEmbedder PooledEmbedder::from_json(const json& j) {
    PooledEmbedder e;
    e.vocab = Vocabulary::from_json(j.at("vocab"));
    e.table = matrix_from_json(j.at("table"));
    e.max_tokens = j.at("max_tokens").get<int>();
    return e;
}

// ------------------------------------------------------------------ network

EncoderParams EncoderParams::init(std::size_t vocab, int dim, int hidden, std::size_t outputs,
                                  std::uint64_t seed) {
    Rng rng(seed);
    const auto V = static_cast<Eigen::Index>(vocab);
    const auto K = static_cast<Eigen::Index>(outputs);
    EncoderParams p;
    p.embedding = random_matrix(V, dim, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
    p.embedding.row(Vocabulary::kPad).setZero();
    p.w1 = random_matrix(hidden, dim, std::sqrt(1.0 / dim), rng);
    p.b1 = Eigen::VectorXd::Zero(hidden);
    p.attention = random_matrix(hidden, 1, std::sqrt(1.0 / hidden), rng).col(0);
    p.head = random_matrix(K, hidden, std::sqrt(1.0 / hidden), rng);
    p.head_bias = Eigen::VectorXd::Zero(K);
    return p;
}

EncoderParams EncoderParams::zeros_like() const {
    EncoderParams z;
    z.embedding = Eigen::MatrixXd::Zero(embedding.rows(), embedding.cols());
    z.w1 = Eigen::MatrixXd::Zero(w1.rows(), w1.cols());
    z.b1 = Eigen::VectorXd::Zero(b1.size());
    z.attention = Eigen::VectorXd::Zero(attention.size());
    z.head = Eigen::MatrixXd::Zero(head.rows(), head.cols());
    z.head_bias = Eigen::VectorXd::Zero(head_bias.size());
    return z;
}

EncoderForward encoder_forward(const EncoderParams& p, const Eigen::MatrixXd& x) {
    EncoderForward f;
    f.x = x;
    f.h = ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh().matrix();
    Eigen::VectorXd scores = f.h * p.attention;
    const double mx = scores.maxCoeff();
    f.alpha = (scores.array() - mx).exp().matrix();
    f.alpha /= f.alpha.sum();
    f.pooled = f.h.transpose() * f.alpha;
    f.logits = p.head * f.pooled + p.head_bias;
    return f;
}

Eigen::MatrixXd encoder_backward(const EncoderParams& p, const EncoderForward& f,
                                 const Eigen::VectorXd& dlogits, EncoderParams* grads) {
    const Eigen::VectorXd dpooled = p.head.transpose() * dlogits;
    const Eigen::VectorXd dalpha = f.h * dpooled;
    const double mean = f.alpha.dot(dalpha);
    const Eigen::VectorXd dscores = f.alpha.cwiseProduct((dalpha.array() - mean).matrix());
    Eigen::MatrixXd dh = f.alpha * dpooled.transpose() + dscores * p.attention.transpose();
    const Eigen::MatrixXd dz = dh.cwiseProduct((1.0 - f.h.array().square()).matrix());
    if (grads != nullptr) {
        grads->head += dlogits * f.pooled.transpose();
        grads->head_bias += dlogits;
        grads->attention += f.h.transpose() * dscores;
        grads->w1 += dz.transpose() * f.x;
        grads->b1 += dz.colwise().sum().transpose();
    }
    return dz * p.w1;
}

Eigen::VectorXd target_vector(const LabeledPost& post, TaskKind task) {
    if (task == TaskKind::Binary) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(2);
        t(post.background == BackgroundTag::WithCsa ? 1 : 0) = 1.0;
        return t;
    }
    Eigen::VectorXd t = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < kAllConditions.size(); ++i) {
        if (post.labels.contains(kAllConditions[i])) t(static_cast<Eigen::Index>(i)) = 1.0;
    }
    return t;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp().matrix();
    return e / e.sum();
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& logits, TaskKind task) {
    if (task == TaskKind::Binary) return softmax(logits);
    Eigen::VectorXd p(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) p(i) = sigmoid(logits(i));
    return p;
}

// Loss and dL/dlogits for one example.
double loss_and_grad(const Eigen::VectorXd& logits, const Eigen::VectorXd& target, TaskKind task,
                     Eigen::VectorXd& dlogits) {
    if (task == TaskKind::Binary) {
        const Eigen::VectorXd p = softmax(logits);
        dlogits = p - target;
        const double mx = logits.maxCoeff();
        const double lse = mx + std::log((logits.array() - mx).exp().sum());
        return lse - logits.dot(target);
    }
    dlogits.resize(logits.size());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double z = logits(i);
        dlogits(i) = sigmoid(z) - target(i);
        // softplus(z) - y z, computed stably.
        loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - target(i) * z;
    }
    return loss;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& table, const std::vector<int>& ids) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(ids.size()), table.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = table.row(ids[i]);
    return x;
}

struct AdamState {
    EncoderParams m;
    EncoderParams v;
    long step = 0;
};

template <typename M>
void adam_update(M& param, const M& grad, M& m, M& v, double lr, double b1c, double b2c,
                 double weight_decay) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    if (weight_decay > 0.0) param *= (1.0 - lr * weight_decay);
    param.array() -= lr * (m.array() / b1c) / ((v.array() / b2c).sqrt() + kEps);
}

void adam_step(EncoderParams& p, const EncoderParams& g, AdamState& s, double lr, double wd) {
    ++s.step;
    const double b1c = 1.0 - std::pow(0.9, static_cast<double>(s.step));
    const double b2c = 1.0 - std::pow(0.999, static_cast<double>(s.step));
    adam_update(p.embedding, g.embedding, s.m.embedding, s.v.embedding, lr, b1c, b2c, 0.0);
    adam_update(p.w1, g.w1, s.m.w1, s.v.w1, lr, b1c, b2c, wd);
    adam_update(p.b1, g.b1, s.m.b1, s.v.b1, lr, b1c, b2c, 0.0);
    adam_update(p.attention, g.attention, s.m.attention, s.v.attention, lr, b1c, b2c, 0.0);
    adam_update(p.head, g.head, s.m.head, s.v.head, lr, b1c, b2c, wd);
    adam_update(p.head_bias, g.head_bias, s.m.head_bias, s.v.head_bias, lr, b1c, b2c, 0.0);
    p.embedding.row(Vocabulary::kPad).setZero();
}

double validation_score(const EncoderParams& p, const std::vector<std::vector<int>>& seqs,
                        std::span<const LabeledPost> posts, TaskKind task) {
    if (task == TaskKind::Binary) {
        std::vector<int> truth;
        std::vector<int> pred;
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            const auto f = encoder_forward(p, gather_rows(p.embedding, seqs[i]));
            truth.push_back(posts[i].background == BackgroundTag::WithCsa ? 1 : 0);
            pred.push_back(f.logits(1) >= f.logits(0) ? 1 : 0);
        }
        return macro_f1(truth, pred, 2);
    }
    std::vector<LabelSet> truth;
    std::vector<LabelSet> pred;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const auto f = encoder_forward(p, gather_rows(p.embedding, seqs[i]));
        LabelSet s;
        for (std::size_t l = 0; l < kAllConditions.size(); ++l) {
            if (f.logits(static_cast<Eigen::Index>(l)) >= 0.0) s.insert(kAllConditions[l]);
        }
        truth.push_back(posts[i].labels);
        pred.push_back(std::move(s));
    }
    return hamming_score(truth, pred);
}

void check_config(const TrainConfig& cfg) {
    if (cfg.epochs <= 0 || cfg.batch_size <= 0 || cfg.learning_rate <= 0.0 ||
        cfg.max_sequence_tokens <= 0 || cfg.embedding_dim <= 0 || cfg.hidden_dim <= 0) {
        throw ParameterError("training configuration values must be positive");
    }
}

}  // namespace

std::unique_ptr<EncoderModel> train_encoder(std::span<const LabeledPost> train,
                                            std::span<const LabeledPost> val, TaskKind task,
                                            Backend backend, const TrainConfig& cfg) {
    check_config(cfg);
    if (train.empty()) throw InputError("training set is empty");
    if (backend != Backend::GeneralEncoder && backend != Backend::DomainEncoder) {
        throw UnsupportedBackend("train_encoder needs an encoder backend");
    }

    std::vector<std::vector<std::string>> docs;
    docs.reserve(train.size());
    for (const auto& p : train) docs.push_back(encoder_tokens(p.text(), cfg.max_sequence_tokens));
    Vocabulary vocab = Vocabulary::build(docs, static_cast<std::size_t>(cfg.max_vocab));
    std::vector<std::vector<int>> train_seqs;
    train_seqs.reserve(docs.size());
    for (const auto& d : docs) train_seqs.push_back(vocab.encode(d));
    std::vector<std::vector<int>> val_seqs;
    for (const auto& p : val) val_seqs.push_back(vocab.encode(encoder_tokens(p.text(), cfg.max_sequence_tokens)));

    const std::size_t outputs = output_dim(task);
    EncoderParams params = EncoderParams::init(vocab.size(), cfg.embedding_dim, cfg.hidden_dim,
                                               outputs, derive_seed(cfg.seed, "train/init"));
    if (backend == Backend::DomainEncoder) {
        params.embedding = pretrain_embeddings(vocab.size(), train_seqs, cfg.embedding_dim,
                                               derive_seed(cfg.seed, "train/pretrain"));
    }

    std::vector<Eigen::VectorXd> targets;
    targets.reserve(train.size());
    for (const auto& p : train) targets.push_back(target_vector(p, task));

    AdamState adam{params.zeros_like(), params.zeros_like(), 0};
    Rng rng(derive_seed(cfg.seed, "train/shuffle"));
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    EncoderParams best = params;
    double best_score = -1.0;
    long step = 0;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            ++step;
            const std::size_t end = std::min(order.size(), start + batch);
            EncoderParams grads = params.zeros_like();
            double batch_loss = 0.0;
            Eigen::VectorXd dlogits;
            for (std::size_t b = start; b < end; ++b) {
                const auto& ids = train_seqs[order[b]];
                const auto f = encoder_forward(params, gather_rows(params.embedding, ids));
                batch_loss += loss_and_grad(f.logits, targets[order[b]], task, dlogits);
                const Eigen::MatrixXd dx = encoder_backward(params, f, dlogits, &grads);
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    if (ids[i] != Vocabulary::kPad) grads.embedding.row(ids[i]) += dx.row(static_cast<Eigen::Index>(i));
                }
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingError("loss diverged at epoch " + std::to_string(epoch) + ", step " +
                                    std::to_string(step));
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            grads.embedding *= scale;
            grads.w1 *= scale;
            grads.b1 *= scale;
            grads.attention *= scale;
            grads.head *= scale;
            grads.head_bias *= scale;
            adam_step(params, grads, adam, cfg.learning_rate, cfg.weight_decay);
        }
        const double score = val.empty() ? 0.0 : validation_score(params, val_seqs, val, task);
        if (val.empty() || score > best_score) {
            best_score = score;
            best = params;
        }
    }
    return std::make_unique<EncoderModel>(task, backend, std::move(vocab), std::move(best),
                                          cfg.max_sequence_tokens);
}

// -------------------------------------------------------------- EncoderModel

EncoderModel::EncoderModel(TaskKind task, Backend backend, Vocabulary vocab, EncoderParams params,
                           int max_tokens)
    : task_(task), backend_(backend), vocab_(std::move(vocab)), params_(std::move(params)),
      max_tokens_(max_tokens) {}

std::vector<std::string> EncoderModel::tokens(const std::string& text) const {
    auto t = encoder_tokens(text, max_tokens_);
    if (t.empty()) t.push_back("[UNK]");
    return t;
}

Eigen::MatrixXd EncoderModel::embed(const std::vector<std::string>& tokens) const {
    return gather_rows(params_.embedding, vocab_.encode(tokens));
}

Eigen::MatrixXd EncoderModel::baseline(std::size_t length) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(length), params_.embedding.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) x.row(r) = params_.embedding.row(Vocabulary::kPad);
    return x;
}

double EncoderModel::output(const Eigen::MatrixXd& x, std::size_t target, Eigen::MatrixXd* grad) const {
    const auto f = encoder_forward(params_, x);
    const auto t = static_cast<Eigen::Index>(target);
    if (t >= f.logits.size()) throw ParameterError("attribution target out of range");
    if (grad != nullptr) {
        Eigen::VectorXd onehot = Eigen::VectorXd::Zero(f.logits.size());
        onehot(t) = 1.0;
        *grad = encoder_backward(params_, f, onehot, nullptr);
    }
    return f.logits(t);
}

Eigen::VectorXd EncoderModel::logits(const std::string& text) const {
    return encoder_forward(params_, embed(tokens(text))).logits;
}

std::vector<double> EncoderModel::predict_proba(const std::string& text) const {
    const Eigen::VectorXd p = probabilities(logits(text), task_);
    return std::vector<double>(p.data(), p.data() + p.size());
}

json EncoderModel::to_json() const {
    json j;
    j["kind"] = "encoder";
    j["task"] = task_ == TaskKind::Binary ? "binary" : "multilabel";
    j["backend"] = std::string(to_string(backend_));
    j["max_tokens"] = max_tokens_;
    j["vocab"] = vocab_.to_json();
    j["embedding"] = matrix_to_json(params_.embedding);
    j["w1"] = matrix_to_json(params_.w1);
    j["b1"] = vector_to_json(params_.b1);
    j["attention"] = vector_to_json(params_.attention);
    j["head"] = matrix_to_json(params_.head);
    j["head_bias"] = vector_to_json(params_.head_bias);
    return j;
}

std::unique_ptr<EncoderModel> EncoderModel::from_json(const json& j) {
    EncoderParams p;
    p.embedding = matrix_from_json(j.at("embedding"));
    p.w1 = matrix_from_json(j.at("w1"));
    p.b1 = vector_from_json(j.at("b1"));
    p.attention = vector_from_json(j.at("attention"));
    p.head = matrix_from_json(j.at("head"));
    p.head_bias = vector_from_json(j.at("head_bias"));
    const TaskKind task = j.at("task").get<std::string>() == "binary" ? TaskKind::Binary : TaskKind::MultiLabel;
    return std::make_unique<EncoderModel>(task, parse_backend(j.at("backend").get<std::string>()),
                                          Vocabulary::from_json(j.at("vocab")), std::move(p),
                                          j.at("max_tokens").get<int>());
}

}  // namespace csakit
