#include "renn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "renn/errors.hpp"

namespace renn {

namespace {

std::size_t argmax(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Prediction read_out(const ModelParams& model, std::span<const double> output) {
    Prediction p;
    if (model.head == Head::Evidence) {
        Vector alpha(output.begin(), output.end());
        for (double& a : alpha) {
            a += 1.0;
        }
        const auto params = DirichletParams::from_alpha(std::move(alpha));
        p.probs = expected_probability(params);
        p.vacuity = vacuity(params);
        p.dissonance = dissonance(params);
    } else {
        p.probs.assign(output.begin(), output.end());
        p.vacuity = 0.0;
        p.dissonance = dissonance(p.probs);
    }
    p.entropy = predictive_entropy(p.probs);
    p.predicted_class = argmax(p.probs);
    return p;
}

}  // namespace

Prediction predict(const ModelParams& model, std::span<const double> x) {
    const auto out = forward(model, x);
    return read_out(model, out);
}

std::vector<Prediction> predict_batch(const ModelParams& model, const Eigen::MatrixXd& inputs) {
    const Eigen::MatrixXd out = forward(model, inputs);
    std::vector<Prediction> preds;
    preds.reserve(static_cast<std::size_t>(out.cols()));
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        preds.push_back(read_out(model, std::span<const double>(out.col(c).data(), static_cast<std::size_t>(out.rows()))));
    }
    return preds;
}

double predictive_entropy(std::span<const double> probs) {
    constexpr double tol = 1e-6;
    double total = 0.0;
    double h = 0.0;
    for (double p : probs) {
        if (!(p >= -tol) || !std::isfinite(p)) {
            throw DomainError("probability vector has a negative entry");
        }
        total += p;
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    if (probs.empty() || std::abs(total - 1.0) > tol) {
        throw DomainError("probability vector does not sum to 1");
    }
    return std::max(h, 0.0);
}

CdfCurve empirical_cdf(std::span<const double> values, double max_value, std::size_t num_thresholds) {
    if (values.empty()) {
        throw DomainError("empirical CDF of an empty set");
    }
    if (num_thresholds < 2) {
        throw DomainError("empirical CDF needs at least 2 thresholds");
    }
    if (!(max_value > 0.0)) {
        throw DomainError("empirical CDF range must be positive");
    }
    std::vector<double> sorted(values.begin(), values.end());
    for (double& v : sorted) {
        if (!(v >= 0.0) || v > max_value + 1e-9) {
            throw DomainError("value outside [0, max_value]");
        }
        v = std::min(v, max_value);
    }
    std::sort(sorted.begin(), sorted.end());
    CdfCurve curve;
    curve.thresholds.resize(num_thresholds);
    curve.cumulative.resize(num_thresholds);
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < num_thresholds; ++i) {
        const double t = i + 1 == num_thresholds
                             ? max_value
                             : max_value * static_cast<double>(i) / static_cast<double>(num_thresholds - 1);
        curve.thresholds[i] = t;
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        curve.cumulative[i] = static_cast<double>(below) / n;
    }
    return curve;
}

std::vector<GridRecord> uncertainty_grid(const ModelParams& model, double lo, double hi, std::size_t resolution) {
    if (model.input_dim() != 2) {
        throw ConfigError("uncertainty grid needs a model with 2-D input, got " + std::to_string(model.input_dim()));
    }
    if (resolution < 2) {
        throw DomainError("grid resolution must be at least 2");
    }
    if (!(hi > lo)) {
        throw DomainError("grid bounds must satisfy min < max");
    }
    const double step = (hi - lo) / static_cast<double>(resolution - 1);
    auto coord = [&](std::size_t i) { return i + 1 == resolution ? hi : lo + step * static_cast<double>(i); };

    std::vector<GridRecord> records;
    records.reserve(resolution * resolution);
    Eigen::MatrixXd row(2, static_cast<Eigen::Index>(resolution));
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        const double y = coord(iy);
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            row(0, static_cast<Eigen::Index>(ix)) = coord(ix);
            row(1, static_cast<Eigen::Index>(ix)) = y;
        }
        const auto preds = predict_batch(model, row);
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            const Prediction& p = preds[ix];
            records.push_back(GridRecord{coord(ix), y, p.vacuity, p.dissonance, p.entropy, p.predicted_class});
        }
    }
    return records;
}

namespace {

Eigen::MatrixXd feature_matrix(const Dataset& dataset) {
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(dataset.feature_dim), static_cast<Eigen::Index>(dataset.size()));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& f = dataset.samples[i].features;
        if (f.size() != dataset.feature_dim) {
            throw DomainError("sample " + std::to_string(i) + " has the wrong feature dimension");
        }
        inputs.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    }
    return inputs;
}

}  // namespace

double accuracy(const ModelParams& model, const Dataset& dataset) {
    if (dataset.samples.empty()) {
        throw DomainError("accuracy of an empty dataset");
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!dataset.samples[i].label) {
            throw DomainError("accuracy: sample " + std::to_string(i) + " is unlabeled");
        }
    }
    const auto preds = predict_batch(model, feature_matrix(dataset));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        correct += preds[i].predicted_class == *dataset.samples[i].label;
    }
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::vector<double> dataset_entropies(const ModelParams& model, const Dataset& dataset) {
    if (dataset.samples.empty()) {
        return {};
    }
    const auto preds = predict_batch(model, feature_matrix(dataset));
    std::vector<double> out;
    out.reserve(preds.size());
    for (const auto& p : preds) {
        out.push_back(p.entropy);
    }
    return out;
}

void write_grid_csv(std::ostream& out, std::span<const GridRecord> records) {
    out << "x,y,vacuity,dissonance,entropy,predicted_class\n";
    for (const auto& r : records) {
        out << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.vacuity) << ','
            << format_double(r.dissonance) << ',' << format_double(r.entropy) << ',' << r.predicted_class << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const CdfCurve& curve) {
    out << "entropy_threshold,cdf\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.cumulative[i]) << '\n';
    }
}

}  // namespace renn
