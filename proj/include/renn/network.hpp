#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace renn {

enum class Head { Evidence, Softmax };
enum class EvidenceActivation { Relu, Softplus };

std::string_view to_string(Head head);
std::string_view to_string(EvidenceActivation activation);
Head parse_head(std::string_view text);
EvidenceActivation parse_evidence_activation(std::string_view text);

/// Fully-connected network: rectifier hidden layers and either an evidence head
/// (nonnegative outputs, alpha = evidence + 1) or a softmax head.
struct ModelParams {
    std::vector<std::size_t> layer_dims;    // input, hidden..., classes
    std::vector<Eigen::MatrixXd> weights;   // weights[i]: layer_dims[i+1] x layer_dims[i]
    std::vector<Eigen::VectorXd> biases;    // biases[i]: layer_dims[i+1]
    Head head = Head::Evidence;
    EvidenceActivation evidence_activation = EvidenceActivation::Relu;
    std::uint64_t seed = 0;
    /// Bumped on every optimizer step; forward caches remember it.
    std::uint64_t revision = 0;

    std::size_t num_layers() const { return weights.size(); }
    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t num_classes() const { return layer_dims.back(); }
    std::size_t parameter_count() const;

    /// Shape and finiteness checks; throws DomainError.
    void validate() const;
};

/// Gaussian weights with standard deviation sqrt(2 / fan_in), zero biases.
/// Bit-identical for identical (layer_dims, seed).
ModelParams init_model(std::span<const std::size_t> layer_dims, Head head, std::uint64_t seed,
                       EvidenceActivation activation = EvidenceActivation::Relu);

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static Gradients zeros_like(const ModelParams& params);
    Gradients& operator+=(const Gradients& other);
    bool all_finite() const;
};

/// Inverted dropout on hidden activations; `keep` is the keep-probability.
struct DropoutSpec {
    double keep = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;  // distinct mask per optimizer step
};

struct ForwardCache {
    std::vector<std::size_t> layer_dims;
    std::uint64_t revision = 0;
    std::vector<Eigen::MatrixXd> layer_inputs;     // input fed to layer i (post-dropout)
    std::vector<Eigen::MatrixXd> pre_activations;  // affine output of layer i
    std::vector<Eigen::MatrixXd> dropout_scale;    // per hidden layer, empty without dropout
    Eigen::MatrixXd output;
};

/// Batched forward pass, one sample per column. The evidence head returns evidence,
/// the softmax head returns probabilities.
Eigen::MatrixXd forward(const ModelParams& params, const Eigen::MatrixXd& inputs, ForwardCache* cache = nullptr,
                        const DropoutSpec* dropout = nullptr);
std::vector<double> forward(const ModelParams& params, std::span<const double> x);

/// Exact gradients of a scalar loss. `grad_output` holds dloss/d(evidence) for the evidence
/// head and dloss/d(logits) for the softmax head, one column per sample of the cached batch.
Gradients backward(const ModelParams& params, const ForwardCache& cache, const Eigen::MatrixXd& grad_output);

struct CrossEntropyResult {
    double loss = 0.0;
    std::vector<double> grad_logits;
};

/// -log p[true] + (weight_decay / 2) * sum of squared weights. The decay gradient is applied
/// separately by add_weight_decay.
CrossEntropyResult cross_entropy_l2(std::span<const double> probs, std::span<const double> y, const ModelParams& params,
                                    double weight_decay);
double weight_penalty(const ModelParams& params, double weight_decay);
void add_weight_decay(Gradients& grads, const ModelParams& params, double weight_decay);

}  // namespace renn
