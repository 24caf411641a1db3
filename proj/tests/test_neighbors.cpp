#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "renn/errors.hpp"
#include "renn/neighbors.hpp"
#include "renn/synthetic.hpp"
#include "support.hpp"

using namespace renn;

namespace {

// Full sort of every labeled candidate; the reference the partial-sort search must match.
std::vector<std::size_t> oracle_knn(const Dataset& ds, std::size_t q, std::size_t k, Metric metric) {
    std::vector<std::pair<double, std::size_t>> all;
    const auto& a = ds.samples[q].features;
    for (std::size_t i : ds.labeled_indices()) {
        if (i == q) continue;
        const auto& b = ds.samples[i].features;
        double score = 0.0;
        if (metric == Metric::Euclidean) {
            for (std::size_t f = 0; f < a.size(); ++f) score += (a[f] - b[f]) * (a[f] - b[f]);
        } else {
            double dot = 0, na = 0, nb = 0;
            for (std::size_t f = 0; f < a.size(); ++f) {
                dot += a[f] * b[f];
                na += a[f] * a[f];
                nb += b[f] * b[f];
            }
            score = -dot / std::sqrt(na * nb);
        }
        all.emplace_back(score, i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < k; ++j) out.push_back(all[j].second);
    return out;
}

}  // namespace

TEST_CASE("cosine similarity") {
    const std::vector<double> a{1, 0}, b{0, 2}, c{3, 0}, z{0, 0}, d{1, 1, 1};
    CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
    CHECK(cosine_similarity(a, c) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cosine_similarity(a, z), DomainError);
    CHECK_THROWS_AS(cosine_similarity(a, d), DomainError);
}

TEST_CASE("metric names") {
    CHECK(parse_metric("cosine") == Metric::Cosine);
    CHECK(to_string(Metric::Euclidean) == "euclidean");
    CHECK_THROWS_AS(parse_metric("manhattan"), ConfigError);
}

TEST_CASE("knn search agrees with a brute-force oracle") {
    const Dataset ds = gen_synthetic(6, 60, 5);
    for (Metric m : {Metric::Euclidean, Metric::Cosine}) {
        for (std::size_t q : {0u, 17u, 90u, 179u, 185u}) {
            CHECK(knn_indices(ds, q, 10, m) == oracle_knn(ds, q, 10, m));
        }
    }
    const auto all = knn_all_labeled(ds, 5, Metric::Euclidean);
    CHECK(all[42] == oracle_knn(ds, 42, 5, Metric::Euclidean));
    CHECK(all[185].empty());
}

TEST_CASE("knn ties go to the lower index and the query is excluded") {
    Dataset ds;
    ds.num_classes = 2;
    ds.feature_dim = 1;
    for (double x : {0.0, 1.0, -1.0, 1.0, 2.0}) ds.samples.push_back({{x}, 0, Partition::In});
    CHECK(knn_indices(ds, 0, 3, Metric::Euclidean) == std::vector<std::size_t>{1, 2, 3});
    CHECK_THROWS_AS(knn_indices(ds, 0, 0, Metric::Euclidean), DomainError);
    CHECK_THROWS_AS(knn_indices(ds, 0, 5, Metric::Euclidean), DomainError);
}

TEST_CASE("neighbour label counts become evidence") {
    Dataset ds;
    ds.num_classes = 3;
    ds.feature_dim = 1;
    const std::size_t labels[] = {0, 0, 1, 2, 0};
    for (std::size_t i = 0; i < 5; ++i) ds.samples.push_back({{static_cast<double>(i)}, labels[i], Partition::In});
    const std::vector<std::size_t> nb{0, 1, 2, 4};
    const auto a = knn_alpha_from_neighbors(ds, nb);
    CHECK(a.alpha(0) == 4.0);
    CHECK(a.alpha(1) == 2.0);
    CHECK(a.alpha(2) == 1.0);
    const auto e = estimate_knn_alpha(ds, 0, 2, Metric::Euclidean);
    CHECK(e.alpha(0) == 2.0);
    CHECK(e.alpha(1) == 2.0);
}

TEST_CASE("boundary selection keeps the most dissonant neighbourhoods") {
    const Dataset ds = gen_synthetic(7, 100, 5);
    const auto bod = select_bod(ds, 10, 40, Metric::Euclidean);
    REQUIRE(bod.size() == 40);
    CHECK(std::is_sorted(bod.begin(), bod.end()));
    CHECK(std::adjacent_find(bod.begin(), bod.end()) == bod.end());
    std::vector<double> diss(ds.size(), -1.0);
    for (std::size_t i : ds.labeled_indices()) diss[i] = dissonance(estimate_knn_alpha(ds, i, 10, Metric::Euclidean));
    double min_sel = 1.0;
    for (std::size_t i : bod) {
        CHECK(ds.samples[i].label.has_value());
        min_sel = std::min(min_sel, diss[i]);
    }
    for (std::size_t i : ds.labeled_indices()) {
        if (!std::binary_search(bod.begin(), bod.end(), i)) CHECK(diss[i] <= min_sel);
    }
    CHECK_THROWS_AS(select_bod(ds, 10, 301, Metric::Euclidean), DomainError);
}
