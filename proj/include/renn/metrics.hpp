#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "renn/dataset.hpp"
#include "renn/network.hpp"
#include "renn/subjective_logic.hpp"

namespace renn {

/// Uncertainty read-out of one model output.
///
/// Evidence head: probabilities are the Dirichlet mean. Softmax head: the output is read
/// as a dogmatic opinion (belief = probabilities, no uncertainty mass), so vacuity is 0.
struct Prediction {
    Vector probs;
    double vacuity = 0.0;
    double dissonance = 0.0;
    double entropy = 0.0;
    std::size_t predicted_class = 0;
};

Prediction predict(const ModelParams& model, std::span<const double> x);
/// One column per sample.
std::vector<Prediction> predict_batch(const ModelParams& model, const Eigen::MatrixXd& inputs);

/// Shannon entropy in nats, 0 ln 0 = 0. Throws DomainError off the simplex (tolerance 1e-6).
double predictive_entropy(std::span<const double> probs);

struct CdfCurve {
    std::vector<double> thresholds;  // evenly spaced on [0, max_value]
    std::vector<double> cumulative;  // fraction of values <= threshold
};

/// Values within 1e-9 above max_value are clamped onto it so the curve always ends at 1.
CdfCurve empirical_cdf(std::span<const double> values, double max_value, std::size_t num_thresholds = 200);

struct GridRecord {
    double x = 0.0;
    double y = 0.0;
    double vacuity = 0.0;
    double dissonance = 0.0;
    double entropy = 0.0;
    std::size_t predicted_class = 0;
};

/// resolution x resolution points over [lo, hi]^2, emitted row by row (y outer, x inner),
/// both ascending. Throws ConfigError unless the model takes 2-D input.
std::vector<GridRecord> uncertainty_grid(const ModelParams& model, double lo = -10.0, double hi = 10.0,
                                         std::size_t resolution = 200);

/// Fraction of samples whose argmax (lowest index on ties) equals the label.
double accuracy(const ModelParams& model, const Dataset& dataset);

/// Predictive entropy of every sample in the dataset, in order.
std::vector<double> dataset_entropies(const ModelParams& model, const Dataset& dataset);

void write_grid_csv(std::ostream& out, std::span<const GridRecord> records);
void write_cdf_csv(std::ostream& out, const CdfCurve& curve);

}  // namespace renn
