#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csakit/corpus.hpp"
#include "csakit/lexical.hpp"
#include "json.hpp"

namespace csakit {

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual Eigen::VectorXd encode(const std::string& text) const = 0;
};

// Sum of per-token pseudo-random sign vectors (seeded by token hash), L2
// normalised. Texts sharing vocabulary land close together.
class HashEmbeddingBackend final : public EmbeddingBackend {
public:
    explicit HashEmbeddingBackend(std::size_t dim = 64, std::uint64_t salt = 0);
    std::string name() const override { return "hash-bow-v1"; }
    std::size_t dim() const override { return dim_; }
    Eigen::VectorXd encode(const std::string& text) const override;

private:
    std::size_t dim_;
    std::uint64_t salt_;
};

struct TopicOptions {
    std::uint64_t seed = 0;
    std::size_t reduced_dim = 5;
    std::size_t min_cluster_size = 5;
    std::size_t coherence_terms = 10;
    int kmeans_restarts = 4;
    int kmeans_iterations = 100;
};

struct TopicCandidate {
    int k = 0;
    std::size_t topics = 0;  // clusters surviving the size floor
    std::size_t outliers = 0;
    double coherence = 0.0;  // mean NPMI over topics
    double diversity = 0.0;  // unique top terms / all top terms
    double score = 0.0;      // coherence * diversity; the selection criterion
    bool feasible = false;
};

struct TopicModel {
    std::vector<std::string> post_ids;
    std::vector<int> assignments;  // topic id per post, -1 = outlier
    std::map<int, TermScoreTable> topic_terms;
    int k = 0;  // = topic_terms.size()
    int selected_candidate = 0;
    double coherence = 0.0;
    std::vector<TopicCandidate> candidates;
    std::string backend;

    nlohmann::json to_json() const;
};

// Embed, reduce with PCA, cluster with seeded k-means++ for each candidate k,
// score clusters with c-TF-IDF and keep the best coherence x diversity.
TopicModel fit_topics(const Corpus& corpus, const EmbeddingBackend& backend,
                      const std::vector<int>& k_candidates, const TopicOptions& opts = {});

// Mean pairwise NPMI of each topic's terms under document co-occurrence.
double npmi_coherence(const std::vector<std::vector<std::string>>& topics,
                      const std::vector<std::set<std::string>>& documents);

// "2..40" or "2,3,5".
std::vector<int> parse_k_candidates(const std::string& text);

// Principal-component projection onto the leading `dims` components.
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& x, std::size_t dims);

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centers;
    double inertia = 0.0;
};
KMeansResult kmeans(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int restarts, int iterations);

}  // namespace csakit
