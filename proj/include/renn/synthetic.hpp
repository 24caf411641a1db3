#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "renn/dataset.hpp"

namespace renn {

/// Class centres of the three-class 2-D mixture (unit covariance each).
inline constexpr std::array<std::array<double, 2>, 3> kSyntheticClassMeans{{{-2.0, -2.0}, {0.0, 1.464}, {2.0, -2.0}}};
/// Centres of the two out-of-distribution clusters.
inline constexpr std::array<std::array<double, 2>, 2> kSyntheticOodMeans{{{-8.0, -8.0}, {8.0, -8.0}}};

/// n_per_class labeled points per class followed by n_per_ood unlabeled OOD points per OOD
/// centre. Sample i draws its coordinates from counters keyed by (seed, i) only.
Dataset gen_synthetic(std::uint64_t seed, std::size_t n_per_class = 1000, std::size_t n_per_ood = 100);

/// Only the OOD clusters, for held-out evaluation.
Dataset gen_synthetic_ood(std::uint64_t seed, std::size_t n_per_ood);

/// Posterior class probabilities of the generative mixture (equal priors).
std::array<double, 3> synthetic_posterior(double x, double y);

/// True where the two largest mixture posteriors differ by less than `margin`.
bool in_boundary_band(double x, double y, double margin = 0.2);

}  // namespace renn
