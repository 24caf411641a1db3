#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "renn/dataset.hpp"
#include "renn/subjective_logic.hpp"

namespace renn {

/// Similarity used to rank neighbours: cosine (descending) or euclidean distance (ascending).
enum class Metric { Cosine, Euclidean };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// The k labeled samples closest to `query_index` (never the query itself), best first;
/// ties go to the lower index.
std::vector<std::size_t> knn_indices(const Dataset& dataset, std::size_t query_index, std::size_t k, Metric metric);

/// knn_indices for every labeled sample, keyed by dataset index (unlabeled entries stay empty).
std::vector<std::vector<std::size_t>> knn_all_labeled(const Dataset& dataset, std::size_t k, Metric metric);

/// Neighbour label counts as evidence under the default prior: alpha_hat = counts + 1.
DirichletParams estimate_knn_alpha(const Dataset& dataset, std::size_t query_index, std::size_t k, Metric metric);
DirichletParams knn_alpha_from_neighbors(const Dataset& dataset, std::span<const std::size_t> neighbors);

/// Boundary-sample selection: rank labeled samples by the dissonance of their k-NN
/// Dirichlet estimate and keep the n highest (ties to the lower index).
/// Returned ids are sorted ascending.
std::vector<std::size_t> select_bod(const Dataset& dataset, std::size_t k = 10, std::size_t n = 500,
                                    Metric metric = Metric::Cosine);

}  // namespace renn
