#include "renn/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "renn/errors.hpp"

namespace renn {

std::string_view to_string(Metric metric) { return metric == Metric::Cosine ? "cosine" : "euclidean"; }

Metric parse_metric(std::string_view text) {
    if (text == "cosine") return Metric::Cosine;
    if (text == "euclidean") return Metric::Euclidean;
    throw ConfigError("unknown metric '" + std::string(text) + "'");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DomainError("cosine similarity of vectors with different lengths");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw DomainError("cosine similarity of a zero vector");
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

// Brute-force scan over the labeled pool. Scores are "smaller is closer":
// squared distance, or negated cosine similarity.
class NeighborSearch {
public:
    NeighborSearch(const Dataset& dataset, Metric metric)
        : dataset_(dataset), metric_(metric), pool_(dataset.labeled_indices()) {
        if (metric_ == Metric::Cosine) {
            norms_.resize(dataset.size(), 0.0);
            for (std::size_t i = 0; i < dataset.size(); ++i) {
                const auto& f = dataset.samples[i].features;
                norms_[i] = std::sqrt(std::inner_product(f.begin(), f.end(), f.begin(), 0.0));
            }
        }
    }

    std::size_t pool_size() const { return pool_.size(); }

    std::vector<std::size_t> query(std::size_t q, std::size_t k) const {
        if (q >= dataset_.size()) {
            throw DomainError("query index out of range");
        }
        const bool query_in_pool = dataset_.samples[q].partition != Partition::Ood;
        const std::size_t available = pool_.size() - (query_in_pool ? 1 : 0);
        if (k == 0 || k > available) {
            throw DomainError("k=" + std::to_string(k) + " but only " + std::to_string(available) +
                              " labeled neighbours are available");
        }
        const auto& fq = dataset_.samples[q].features;
        if (metric_ == Metric::Cosine && norms_[q] == 0.0) {
            throw DomainError("cosine similarity of a zero vector (sample " + std::to_string(q) + ")");
        }
        scored_.clear();
        for (std::size_t idx : pool_) {
            if (idx == q) {
                continue;
            }
            scored_.emplace_back(score(fq, q, idx), idx);
        }
        std::partial_sort(scored_.begin(), scored_.begin() + static_cast<std::ptrdiff_t>(k), scored_.end());
        std::vector<std::size_t> out(k);
        for (std::size_t j = 0; j < k; ++j) {
            out[j] = scored_[j].second;
        }
        return out;
    }

private:
    double score(const std::vector<double>& fq, std::size_t q, std::size_t idx) const {
        const auto& f = dataset_.samples[idx].features;
        if (metric_ == Metric::Euclidean) {
            double d = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double diff = fq[i] - f[i];
                d += diff * diff;
            }
            return d;
        }
        if (norms_[idx] == 0.0) {
            throw DomainError("cosine similarity of a zero vector (sample " + std::to_string(idx) + ")");
        }
        const double dot = std::inner_product(f.begin(), f.end(), fq.begin(), 0.0);
        return -(dot / (norms_[q] * norms_[idx]));
    }

    const Dataset& dataset_;
    Metric metric_;
    std::vector<std::size_t> pool_;
    std::vector<double> norms_;
    mutable std::vector<std::pair<double, std::size_t>> scored_;
};

}  // namespace

std::vector<std::size_t> knn_indices(const Dataset& dataset, std::size_t query_index, std::size_t k, Metric metric) {
    return NeighborSearch(dataset, metric).query(query_index, k);
}

std::vector<std::vector<std::size_t>> knn_all_labeled(const Dataset& dataset, std::size_t k, Metric metric) {
    const NeighborSearch search(dataset, metric);
    std::vector<std::vector<std::size_t>> out(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.samples[i].partition != Partition::Ood) {
            out[i] = search.query(i, k);
        }
    }
    return out;
}

DirichletParams knn_alpha_from_neighbors(const Dataset& dataset, std::span<const std::size_t> neighbors) {
    Vector counts(dataset.num_classes, 0.0);
    for (std::size_t idx : neighbors) {
        const auto& label = dataset.samples.at(idx).label;
        if (!label || *label >= dataset.num_classes) {
            throw DomainError("neighbour " + std::to_string(idx) + " has no valid label");
        }
        counts[*label] += 1.0;
    }
    return evidence_to_alpha(counts);
}

DirichletParams estimate_knn_alpha(const Dataset& dataset, std::size_t query_index, std::size_t k, Metric metric) {
    const auto neighbors = knn_indices(dataset, query_index, k, metric);
    return knn_alpha_from_neighbors(dataset, neighbors);
}

std::vector<std::size_t> select_bod(const Dataset& dataset, std::size_t k, std::size_t n, Metric metric) {
    const std::vector<std::size_t> candidates = dataset.labeled_indices();
    if (n > candidates.size()) {
        throw DomainError("cannot select " + std::to_string(n) + " boundary samples from " +
                          std::to_string(candidates.size()) + " labeled samples");
    }
    const NeighborSearch search(dataset, metric);
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        const auto neighbors = search.query(idx, k);
        ranked.emplace_back(dissonance(knn_alpha_from_neighbors(dataset, neighbors)), idx);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        chosen.push_back(ranked[j].second);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace renn
