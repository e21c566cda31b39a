#include "csakit/topics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "csakit/errors.hpp"
#include "csakit/rng.hpp"
#include "csakit/text.hpp"

namespace csakit {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::string> flat_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& sentence : sentence_tokens(text)) {
        for (auto& t : sentence) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

HashEmbeddingBackend::HashEmbeddingBackend(std::size_t dim, std::uint64_t salt) : dim_(dim), salt_(salt) {
    if (dim == 0) throw ParameterError("embedding dimension must be positive");
}

Eigen::VectorXd HashEmbeddingBackend::encode(const std::string& text) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& tok : flat_tokens(text)) {
        std::uint64_t state = fnv1a(tok) ^ salt_;
        std::uint64_t bits = 0;
        for (std::size_t d = 0; d < dim_; ++d) {
            if (d % 64 == 0) bits = splitmix(state);
            v[static_cast<Eigen::Index>(d)] += (bits >> (d % 64)) & 1U ? 1.0 : -1.0;
        }
    }
    const double norm = v.norm();
    if (norm > 0) v /= norm;
    return v;
}

// ------------------------------------------------------------------ helpers

std::vector<int> parse_k_candidates(const std::string& text) {
    std::vector<int> out;
    auto parse_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw ParameterError("bad k candidate '" + s + "'");
        }
        if (used != s.size() || v < 1) throw ParameterError("bad k candidate '" + s + "'");
        return v;
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = parse_int(text.substr(0, dots));
        const int hi = parse_int(text.substr(dots + 2));
        if (hi < lo) throw ParameterError("empty k range " + text);
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(parse_int(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& x, std::size_t dims) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / std::max<Eigen::Index>(1, x.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::Index d = std::min<Eigen::Index>(static_cast<Eigen::Index>(dims), x.cols());
    Eigen::MatrixXd basis(x.cols(), d);
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::VectorXd col = eig.eigenvectors().col(x.cols() - 1 - j);
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col[arg] < 0) col = -col;
        basis.col(j) = col;
    }
    return centered * basis;
}

KMeansResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int restarts, int iterations) {
    const Eigen::Index n = x.rows();
    if (k < 1 || k > n) throw ParameterError("k must lie in [1, number of points]");
    Rng rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        Eigen::MatrixXd centers(k, x.cols());
        centers.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
        Eigen::VectorXd d2(n);
        for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double total = d2.sum();
            Eigen::Index pick = 0;
            if (total > 0) {
                double target = rng.uniform() * total;
                for (pick = 0; pick < n - 1; ++pick) {
                    target -= d2[pick];
                    if (target < 0) break;
                }
            } else {
                pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
            }
            centers.row(c) = x.row(pick);
            for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (x.row(i) - centers.row(c)).squaredNorm());
        }
        std::vector<int> labels(static_cast<std::size_t>(n), -1);
        double inertia = 0.0;
        for (int it = 0; it < iterations; ++it) {
            bool changed = false;
            inertia = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                int arg = 0;
                double bestd = std::numeric_limits<double>::infinity();
                for (int c = 0; c < k; ++c) {
                    const double d = (x.row(i) - centers.row(c)).squaredNorm();
                    if (d < bestd) {
                        bestd = d;
                        arg = c;
                    }
                }
                inertia += bestd;
                if (labels[static_cast<std::size_t>(i)] != arg) {
                    labels[static_cast<std::size_t>(i)] = arg;
                    changed = true;
                }
            }
            if (!changed && it > 0) break;
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
                ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
            }
            for (int c = 0; c < k; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) {
                    centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                    continue;
                }
                // Empty cluster: move it to the point farthest from its centre.
                Eigen::Index far = 0;
                double fard = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d = (x.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
                    if (d > fard) {
                        fard = d;
                        far = i;
                    }
                }
                centers.row(c) = x.row(far);
            }
        }
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = labels;
            best.centers = centers;
        }
    }
    return best;
}

double npmi_coherence(const std::vector<std::vector<std::string>>& topics,
                      const std::vector<std::set<std::string>>& documents) {
    if (topics.empty() || documents.empty()) return 0.0;
    const double n = static_cast<double>(documents.size());
    auto prob = [&](const std::string& a, const std::string* b) {
        std::size_t hits = 0;
        for (const auto& doc : documents) hits += doc.contains(a) && (b == nullptr || doc.contains(*b));
        return static_cast<double>(hits) / n;
    };
    double total = 0.0;
    for (const auto& terms : topics) {
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t j = i + 1; j < terms.size(); ++j) {
                const double pij = prob(terms[i], &terms[j]);
                double v = -1.0;
                if (pij >= 1.0) {
                    v = 1.0;
                } else if (pij > 0.0) {
                    v = std::log(pij / (prob(terms[i], nullptr) * prob(terms[j], nullptr))) / -std::log(pij);
                }
                sum += v;
                ++pairs;
            }
        }
        total += pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
    }
    return total / static_cast<double>(topics.size());
}

// ------------------------------------------------------------------ fitting

namespace {

struct Clustering {
    std::vector<int> assignments;
    std::map<int, TermScoreTable> terms;
};

Clustering finalize(const std::vector<int>& raw, int k, const TokenizedCorpus& tokens, std::size_t min_size) {
    std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
    std::vector<std::size_t> first(static_cast<std::size_t>(k), raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto c = static_cast<std::size_t>(raw[i]);
        ++size[c];
        first[c] = std::min(first[c], i);
    }
    // Topic ids by descending size, then by earliest member.
    std::vector<int> order;
    for (int c = 0; c < k; ++c) {
        if (size[static_cast<std::size_t>(c)] >= min_size) order.push_back(c);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (size[ua] != size[ub]) return size[ua] > size[ub];
        return first[ua] < first[ub];
    });
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    for (std::size_t t = 0; t < order.size(); ++t) remap[static_cast<std::size_t>(order[t])] = static_cast<int>(t);

    Clustering out;
    std::map<int, std::vector<std::string>> concat;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int t = remap[static_cast<std::size_t>(raw[i])];
        out.assignments.push_back(t);
        if (t < 0) continue;
        auto& bucket = concat[t];
        bucket.insert(bucket.end(), tokens.docs[i].begin(), tokens.docs[i].end());
    }
    std::map<std::string, TokenizedCorpus> classes;
    for (auto& [t, terms] : concat) {
        if (terms.empty()) continue;
        classes.emplace(std::to_string(t), TokenizedCorpus::from_docs({std::move(terms)}, tokens.n));
    }
    if (!classes.empty()) {
        for (auto& [name, table] : c_tfidf(classes)) out.terms.emplace(std::stoi(name), std::move(table));
    }
    return out;
}

}  // namespace

TopicModel fit_topics(const Corpus& corpus, const EmbeddingBackend& backend,
                      const std::vector<int>& k_candidates, const TopicOptions& opts) {
    if (k_candidates.empty()) throw ParameterError("no k candidates given");
    if (corpus.posts.empty()) throw ModelFitError("topic model needs a nonempty corpus");
    if (corpus.posts.size() < opts.min_cluster_size) {
        throw ModelFitError("corpus has " + std::to_string(corpus.posts.size()) +
                            " posts, fewer than the minimum cluster size " +
                            std::to_string(opts.min_cluster_size));
    }
    const auto n = static_cast<Eigen::Index>(corpus.posts.size());
    Eigen::MatrixXd emb(n, static_cast<Eigen::Index>(backend.dim()));
    std::vector<std::string> texts;
    for (Eigen::Index i = 0; i < n; ++i) {
        texts.push_back(corpus.posts[static_cast<std::size_t>(i)].canonical_text());
        const Eigen::VectorXd v = backend.encode(texts.back());
        if (v.size() != emb.cols() || !v.allFinite()) {
            throw ModelFitError("embedding backend returned a bad vector for post " +
                                corpus.posts[static_cast<std::size_t>(i)].id);
        }
        emb.row(i) = v.transpose();
    }
    const Eigen::MatrixXd reduced = pca_reduce(emb, opts.reduced_dim);
    const TokenizedCorpus tokens = tokenize_texts(texts, 1);
    std::vector<std::set<std::string>> doc_sets;
    for (const auto& doc : tokens.docs) doc_sets.emplace_back(doc.begin(), doc.end());

    TopicModel model;
    model.backend = backend.name();
    for (const auto& p : corpus.posts) model.post_ids.push_back(p.id);
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<int> ks = k_candidates;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
        TopicCandidate cand;
        cand.k = k;
        if (k < 1 || k > n) {
            model.candidates.push_back(cand);
            continue;
        }
        const auto km = kmeans(reduced, k, derive_seed(opts.seed, "topics/k" + std::to_string(k)),
                               opts.kmeans_restarts, opts.kmeans_iterations);
        Clustering cl = finalize(km.labels, k, tokens, opts.min_cluster_size);
        cand.topics = cl.terms.size();
        cand.outliers = static_cast<std::size_t>(std::count(cl.assignments.begin(), cl.assignments.end(), -1));
        if (cl.terms.empty()) {
            model.candidates.push_back(cand);
            continue;
        }
        std::vector<std::vector<std::string>> tops;
        std::set<std::string> unique;
        std::size_t all = 0;
        for (const auto& [t, table] : cl.terms) {
            std::vector<std::string> words;
            for (const auto& row : table.top(opts.coherence_terms).rows) words.push_back(row.term);
            unique.insert(words.begin(), words.end());
            all += words.size();
            tops.push_back(std::move(words));
        }
        cand.feasible = true;
        cand.coherence = npmi_coherence(tops, doc_sets);
        cand.diversity = all > 0 ? static_cast<double>(unique.size()) / static_cast<double>(all) : 0.0;
        cand.score = cand.coherence * cand.diversity;
        model.candidates.push_back(cand);
        if (cand.score > best_score) {
            best_score = cand.score;
            model.assignments = std::move(cl.assignments);
            model.topic_terms = std::move(cl.terms);
            model.k = static_cast<int>(model.topic_terms.size());
            model.selected_candidate = k;
            model.coherence = cand.coherence;
        }
    }
    if (model.topic_terms.empty()) {
        throw ModelFitError("no candidate k produced a cluster of at least " +
                            std::to_string(opts.min_cluster_size) + " posts");
    }
    return model;
}

json TopicModel::to_json() const {
    json j;
    j["backend"] = backend;
    j["k"] = k;
    j["selected_candidate"] = selected_candidate;
    j["coherence"] = coherence;
    json assign = json::object();
    for (std::size_t i = 0; i < post_ids.size(); ++i) assign[post_ids[i]] = assignments[i];
    j["assignments"] = assign;
    json topics = json::object();
    for (const auto& [t, table] : topic_terms) {
        json rows = json::array();
        for (const auto& row : table.rows) rows.push_back({{"term", row.term}, {"score", row.score}});
        topics[std::to_string(t)] = rows;
    }
    j["topics"] = topics;
    json cands = json::array();
    for (const auto& c : candidates) {
        cands.push_back({{"k", c.k},
                         {"feasible", c.feasible},
                         {"topics", c.topics},
                         {"outliers", c.outliers},
                         {"coherence", c.coherence},
                         {"diversity", c.diversity},
                         {"score", c.score}});
    }
    j["candidates"] = cands;
    return j;
}

}  // namespace csakit
