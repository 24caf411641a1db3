#include "renn/subjective_logic.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "renn/errors.hpp"

namespace renn {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_base_rate(std::span<const double> base_rate) {
    if (base_rate.size() < 2) {
        throw DomainError("opinion domain needs at least 2 classes");
    }
    for (double a : base_rate) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("base rate entries must be positive");
        }
    }
    if (std::abs(sum(base_rate) - 1.0) > kSimplexTolerance) {
        throw DomainError("base rate must sum to 1");
    }
}

}  // namespace

Opinion make_opinion(Vector belief, double uncertainty, Vector base_rate) {
    check_base_rate(base_rate);
    if (belief.size() != base_rate.size()) {
        throw DomainError("belief and base rate have different lengths");
    }
    for (double b : belief) {
        if (!(b >= 0.0)) {
            throw DomainError("belief masses must be nonnegative");
        }
    }
    if (!(uncertainty >= 0.0)) {
        throw DomainError("uncertainty mass must be nonnegative");
    }
    if (std::abs(sum(belief) + uncertainty - 1.0) > kSimplexTolerance) {
        throw DomainError("belief masses and uncertainty must sum to 1");
    }
    return Opinion{std::move(belief), uncertainty, std::move(base_rate)};
}

DirichletParams::DirichletParams(Vector alpha, double prior_weight, Vector base_rate)
    : alpha_(std::move(alpha)), prior_weight_(prior_weight), base_rate_(std::move(base_rate)) {
    check_base_rate(base_rate_);
    if (alpha_.size() != base_rate_.size()) {
        throw DomainError("alpha and base rate have different lengths");
    }
    if (!(prior_weight_ > 0.0) || !std::isfinite(prior_weight_)) {
        throw DomainError("prior weight must be positive");
    }
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
        if (!std::isfinite(alpha_[j]) || !(evidence(j) >= 0.0)) {
            throw DomainError("alpha[" + std::to_string(j) + "] is below its prior mass (negative evidence)");
        }
    }
    strength_ = sum(alpha_);
}

DirichletParams DirichletParams::from_alpha(Vector alpha) {
    Vector base_rate = uniform_base_rate(alpha.size());
    const auto k = static_cast<double>(alpha.size());
    return DirichletParams(std::move(alpha), k, std::move(base_rate));
}

DirichletParams DirichletParams::from_alpha(Vector alpha, double prior_weight, Vector base_rate) {
    return DirichletParams(std::move(alpha), prior_weight, std::move(base_rate));
}

Vector DirichletParams::evidence() const {
    Vector r(alpha_.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        r[j] = evidence(j);
    }
    return r;
}

Vector uniform_base_rate(std::size_t num_classes) {
    if (num_classes < 2) {
        throw DomainError("opinion domain needs at least 2 classes");
    }
    return Vector(num_classes, 1.0 / static_cast<double>(num_classes));
}

DirichletParams evidence_to_alpha(std::span<const double> evidence) {
    const auto k = static_cast<double>(evidence.size());
    const Vector base_rate = uniform_base_rate(evidence.size());
    return evidence_to_alpha(evidence, k, base_rate);
}

DirichletParams evidence_to_alpha(std::span<const double> evidence, double prior_weight,
                                  std::span<const double> base_rate) {
    check_base_rate(base_rate);
    if (evidence.size() != base_rate.size()) {
        throw DomainError("evidence and base rate have different lengths");
    }
    Vector alpha(evidence.size());
    for (std::size_t j = 0; j < evidence.size(); ++j) {
        if (!(evidence[j] >= 0.0)) {
            throw DomainError("evidence must be nonnegative");
        }
        alpha[j] = evidence[j] + base_rate[j] * prior_weight;
    }
    return DirichletParams::from_alpha(std::move(alpha), prior_weight, Vector(base_rate.begin(), base_rate.end()));
}

Opinion alpha_to_opinion(const DirichletParams& params) {
    const double s = params.strength();
    Opinion op;
    op.belief.resize(params.num_classes());
    for (std::size_t j = 0; j < op.belief.size(); ++j) {
        op.belief[j] = params.evidence(j) / s;
    }
    op.uncertainty = params.prior_weight() / s;
    op.base_rate.assign(params.base_rate().begin(), params.base_rate().end());
    return op;
}

Vector projected_probability(const Opinion& opinion) {
    Vector p(opinion.belief.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = opinion.belief[j] + opinion.base_rate[j] * opinion.uncertainty;
    }
    return p;
}

Vector expected_probability(const DirichletParams& params) {
    Vector p(params.alpha().begin(), params.alpha().end());
    const double s = params.strength();
    for (double& v : p) {
        v /= s;
    }
    return p;
}

double vacuity(const DirichletParams& params) { return params.prior_weight() / params.strength(); }

double balance(double b_j, double b_i) {
    const double total = b_j + b_i;
    if (total == 0.0) {
        return 1.0;
    }
    return 1.0 - std::abs(b_j - b_i) / total;
}

double dissonance(std::span<const double> belief) {
    const double total = sum(belief);
    if (total == 0.0) {
        return 0.0;
    }
    double diss = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) {
        if (belief[i] == 0.0) {
            continue;
        }
        double weighted = 0.0;
        double others = 0.0;
        for (std::size_t j = 0; j < belief.size(); ++j) {
            if (j == i) {
                continue;
            }
            weighted += belief[j] * balance(belief[j], belief[i]);
            others += belief[j];
        }
        if (others > 0.0) {
            diss += belief[i] * weighted / others;
        }
    }
    return diss;
}

double dissonance(const DirichletParams& params) { return dissonance(alpha_to_opinion(params).belief); }

double dirichlet_log_density(std::span<const double> p, const DirichletParams& params) {
    if (p.size() != params.num_classes()) {
        throw DomainError("density point has wrong dimension");
    }
    for (double v : p) {
        if (!(v > 0.0)) {
            throw DomainError("density point must lie strictly inside the simplex");
        }
    }
    if (std::abs(sum(p) - 1.0) > kSimplexTolerance) {
        throw DomainError("density point must sum to 1");
    }
    double log_density = std::lgamma(params.strength());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double a = params.alpha(j);
        log_density += (a - 1.0) * std::log(p[j]) - std::lgamma(a);
    }
    return log_density;
}

}  // namespace renn
