#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "renn/dataset.hpp"
#include "renn/loss.hpp"
#include "renn/neighbors.hpp"
#include "renn/network.hpp"

namespace renn {

/// Comparison schemes: softmax + weight decay, plain evidential, and the three regularized forms.
enum class Variant { L2, Enn, EnnVac, EnnDiss, EnnVacDiss };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);
bool uses_vacuity(Variant v);
bool uses_dissonance(Variant v);

struct TrainConfig {
    Variant variant = Variant::Enn;
    std::size_t batch_size = 1000;
    double learning_rate = 0.01;
    bool use_dropout = false;
    double dropout_keep = 0.9;
    double weight_decay = 0.005;
    double lambda1 = 0.01;
    double lambda2 = 0.01;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden_layers{64, 64};
    bool use_knn_kl = false;
    std::size_t knn_k = 10;
    Metric knn_metric = Metric::Euclidean;
    std::size_t kl_anneal_epochs = 10;
    EvidenceActivation evidence_activation = EvidenceActivation::Relu;

    /// Throws ConfigError.
    void validate() const;
    /// Coefficients actually applied for this variant (unused regularizers get zero weight).
    LossConfig loss_config() const;
};

struct TrainResult {
    ModelParams model;
    std::vector<LossBreakdown> history;  // per-epoch mean of the batch objectives
};

using EpochCallback = std::function<void(std::size_t epoch, const LossBreakdown&)>;

/// Mini-batch Adam training. Each batch takes batch_size labeled (IN + BOD) samples from a
/// seeded shuffle and, for vacuity variants, ceil(batch * |OOD| / |labeled|) OOD samples
/// cycled from their own shuffle. Weight decay applies to every variant and `total` includes
/// the weight penalty. For the L2 variant the `ssl` column holds the mean cross-entropy.
///
/// Throws ConfigError when the dataset lacks a partition the variant needs, TrainingError
/// on non-finite gradients.
TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace renn
