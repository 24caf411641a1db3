#include "renn/network.hpp"

#include <cmath>
#include <string>

#include "renn/errors.hpp"
#include "renn/random.hpp"

namespace renn {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void softmax_columns(Eigen::MatrixXd& logits) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        auto col = logits.col(c);
        const double peak = col.maxCoeff();
        col = (col.array() - peak).exp();
        col /= col.sum();
    }
}

}  // namespace

std::string_view to_string(Head head) { return head == Head::Evidence ? "evidence" : "softmax"; }

std::string_view to_string(EvidenceActivation activation) {
    return activation == EvidenceActivation::Relu ? "relu" : "softplus";
}

Head parse_head(std::string_view text) {
    if (text == "evidence") return Head::Evidence;
    if (text == "softmax") return Head::Softmax;
    throw ConfigError("unknown head '" + std::string(text) + "'");
}

EvidenceActivation parse_evidence_activation(std::string_view text) {
    if (text == "relu") return EvidenceActivation::Relu;
    if (text == "softplus") return EvidenceActivation::Softplus;
    throw ConfigError("unknown evidence activation '" + std::string(text) + "'");
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
    }
    return n;
}

void ModelParams::validate() const {
    if (layer_dims.size() < 2) {
        throw DomainError("a network needs at least an input and an output layer");
    }
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
        throw DomainError("parameter list does not match layer_dims");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto rows = static_cast<Eigen::Index>(layer_dims[i + 1]);
        const auto cols = static_cast<Eigen::Index>(layer_dims[i]);
        if (weights[i].rows() != rows || weights[i].cols() != cols || biases[i].size() != rows) {
            throw DomainError("layer " + std::to_string(i) + " has the wrong shape");
        }
        if (!weights[i].allFinite() || !biases[i].allFinite()) {
            throw DomainError("layer " + std::to_string(i) + " holds non-finite parameters");
        }
    }
}

ModelParams init_model(std::span<const std::size_t> layer_dims, Head head, std::uint64_t seed,
                       EvidenceActivation activation) {
    if (layer_dims.size() < 2) {
        throw DomainError("layer_dims needs at least two entries");
    }
    for (std::size_t d : layer_dims) {
        if (d == 0) {
            throw DomainError("layer widths must be positive");
        }
    }
    ModelParams params;
    params.layer_dims.assign(layer_dims.begin(), layer_dims.end());
    params.head = head;
    params.evidence_activation = activation;
    params.seed = seed;
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
        const auto rows = static_cast<Eigen::Index>(layer_dims[i + 1]);
        const auto cols = static_cast<Eigen::Index>(layer_dims[i]);
        const double scale = std::sqrt(2.0 / static_cast<double>(cols));
        const CounterRng rng(seed, i);
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                w(r, c) = scale * rng.normal(static_cast<std::uint64_t>(r * cols + c));
            }
        }
        params.weights.push_back(std::move(w));
        params.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    return params;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
    Gradients g;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        g.weights.push_back(Eigen::MatrixXd::Zero(params.weights[i].rows(), params.weights[i].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(params.biases[i].size()));
    }
    return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] += other.weights[i];
        biases[i] += other.biases[i];
    }
    return *this;
}

bool Gradients::all_finite() const {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!weights[i].allFinite() || !biases[i].allFinite()) {
            return false;
        }
    }
    return true;
}

Eigen::MatrixXd forward(const ModelParams& params, const Eigen::MatrixXd& inputs, ForwardCache* cache,
                        const DropoutSpec* dropout) {
    if (params.layer_dims.size() < 2 || params.weights.size() + 1 != params.layer_dims.size()) {
        throw DomainError("model has no layers");
    }
    if (inputs.rows() != static_cast<Eigen::Index>(params.input_dim())) {
        throw DomainError("input has " + std::to_string(inputs.rows()) + " features, model expects " +
                          std::to_string(params.input_dim()));
    }
    const bool use_dropout = dropout != nullptr && dropout->keep < 1.0;
    if (use_dropout && !(dropout->keep > 0.0)) {
        throw DomainError("dropout keep-probability must lie in (0, 1]");
    }
    if (cache) {
        cache->layer_dims = params.layer_dims;
        cache->revision = params.revision;
        cache->layer_inputs.clear();
        cache->pre_activations.clear();
        cache->dropout_scale.clear();
    }

    Eigen::MatrixXd activation = inputs;
    const std::size_t last = params.num_layers() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        Eigen::MatrixXd z = params.weights[i] * activation;
        z.colwise() += params.biases[i];
        if (cache) {
            cache->layer_inputs.push_back(std::move(activation));
            cache->pre_activations.push_back(z);
        }
        if (i < last) {
            activation = z.cwiseMax(0.0);
            if (use_dropout) {
                // Mask keyed by (step, layer, unit, sample) so it is reproducible.
                const CounterRng rng(dropout->seed ^ 0xd50f0u, dropout->step * 1024 + i);
                Eigen::MatrixXd scale(activation.rows(), activation.cols());
                for (Eigen::Index c = 0; c < scale.cols(); ++c) {
                    for (Eigen::Index r = 0; r < scale.rows(); ++r) {
                        const auto counter = static_cast<std::uint64_t>(c * scale.rows() + r);
                        scale(r, c) = rng.uniform(counter) < dropout->keep ? 1.0 / dropout->keep : 0.0;
                    }
                }
                activation.array() *= scale.array();
                if (cache) {
                    cache->dropout_scale.push_back(std::move(scale));
                }
            }
        } else if (params.head == Head::Softmax) {
            softmax_columns(z);
            activation = std::move(z);
        } else if (params.evidence_activation == EvidenceActivation::Relu) {
            activation = z.cwiseMax(0.0);
        } else {
            activation = z.unaryExpr([](double v) { return softplus(v); });
        }
    }
    if (cache) {
        cache->output = activation;
    }
    return activation;
}

std::vector<double> forward(const ModelParams& params, std::span<const double> x) {
    const Eigen::MatrixXd input = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::MatrixXd out = forward(params, input);
    return std::vector<double>(out.data(), out.data() + out.size());
}

Gradients backward(const ModelParams& params, const ForwardCache& cache, const Eigen::MatrixXd& grad_output) {
    if (cache.layer_dims != params.layer_dims || cache.revision != params.revision ||
        cache.pre_activations.size() != params.num_layers()) {
        throw InternalError("forward cache does not belong to the current parameters");
    }
    if (grad_output.rows() != cache.output.rows() || grad_output.cols() != cache.output.cols()) {
        throw InternalError("output gradient shape does not match the cached batch");
    }
    Gradients grads = Gradients::zeros_like(params);
    const std::size_t last = params.num_layers() - 1;

    Eigen::MatrixXd delta = grad_output;
    if (params.head == Head::Evidence) {
        const Eigen::MatrixXd& z = cache.pre_activations[last];
        if (params.evidence_activation == EvidenceActivation::Relu) {
            delta.array() *= (z.array() > 0.0).cast<double>();
        } else {
            delta.array() *= z.unaryExpr([](double v) { return logistic(v); }).array();
        }
    }
    for (std::size_t step = 0; step <= last; ++step) {
        const std::size_t i = last - step;
        grads.weights[i] = delta * cache.layer_inputs[i].transpose();
        grads.biases[i] = delta.rowwise().sum();
        if (i == 0) {
            break;
        }
        delta = params.weights[i].transpose() * delta;
        if (!cache.dropout_scale.empty()) {
            delta.array() *= cache.dropout_scale[i - 1].array();
        }
        delta.array() *= (cache.pre_activations[i - 1].array() > 0.0).cast<double>();
    }
    return grads;
}

double weight_penalty(const ModelParams& params, double weight_decay) {
    double sq = 0.0;
    for (const auto& w : params.weights) {
        sq += w.squaredNorm();
    }
    return 0.5 * weight_decay * sq;
}

void add_weight_decay(Gradients& grads, const ModelParams& params, double weight_decay) {
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        grads.weights[i] += weight_decay * params.weights[i];
    }
}

CrossEntropyResult cross_entropy_l2(std::span<const double> probs, std::span<const double> y, const ModelParams& params,
                                    double weight_decay) {
    if (probs.size() != y.size()) {
        throw DomainError("probability and target lengths differ");
    }
    CrossEntropyResult out;
    out.grad_logits.resize(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (y[j] > 0.0) {
            out.loss -= y[j] * std::log(std::max(probs[j], 1e-300));
        }
        out.grad_logits[j] = probs[j] - y[j];
    }
    out.loss += weight_penalty(params, weight_decay);
    return out;
}

}  // namespace renn
