#include "renn/optimizer.hpp"

#include <cmath>

#include "renn/errors.hpp"

namespace renn {

AdamState AdamState::for_model(const ModelParams& params, double learning_rate) {
    AdamState state;
    state.first_moment = Gradients::zeros_like(params);
    state.second_moment = Gradients::zeros_like(params);
    state.learning_rate = learning_rate;
    return state;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
    if (grads.weights.size() != params.weights.size() || state.first_moment.weights.size() != params.weights.size()) {
        throw DomainError("gradient and parameter shapes differ");
    }
    for (std::size_t i = 0; i < grads.weights.size(); ++i) {
        if (!grads.weights[i].allFinite()) {
            throw TrainingError("non-finite weight gradient in layer " + std::to_string(i));
        }
        if (!grads.biases[i].allFinite()) {
            throw TrainingError("non-finite bias gradient in layer " + std::to_string(i));
        }
    }

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    const double step_size = state.learning_rate / correction1;
    const double sqrt_c2 = std::sqrt(correction2);
    const double eps = state.epsilon;

    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = state.beta1 * m + (1.0 - state.beta1) * grad;
        v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
        // p -= lr * m_hat / (sqrt(v_hat) + eps)
        param.array() -= step_size * m.array() / ((v.array().sqrt() / sqrt_c2) + eps);
    };
    for (std::size_t i = 0; i < grads.weights.size(); ++i) {
        update(params.weights[i], grads.weights[i], state.first_moment.weights[i], state.second_moment.weights[i]);
        update(params.biases[i], grads.biases[i], state.first_moment.biases[i], state.second_moment.biases[i]);
    }
    ++params.revision;
}

}  // namespace renn
