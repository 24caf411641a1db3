#pragma once

#include <cstdint>

#include "renn/network.hpp"

namespace renn {

struct AdamState {
    Gradients first_moment;
    Gradients second_moment;
    std::uint64_t step_count = 0;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_model(const ModelParams& params, double learning_rate);
};

/// Bias-corrected Adam update. Throws TrainingError on a non-finite gradient entry,
/// leaving params and state untouched.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

}  // namespace renn
