#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace renn {

using Vector = std::vector<double>;

/// Absolute tolerance for additivity and simplex checks.
inline constexpr double kSimplexTolerance = 1e-9;

/// Multinomial subjective opinion (belief masses, uncertainty mass, base rates).
struct Opinion {
    Vector belief;
    double uncertainty = 1.0;
    Vector base_rate;

    std::size_t num_classes() const { return belief.size(); }
};

/// Validates additivity, base-rate normalisation and K >= 2. Throws DomainError.
Opinion make_opinion(Vector belief, double uncertainty, Vector base_rate);

/// Dirichlet strength vector together with the prior it was built from.
///
/// alpha[j] = evidence[j] + base_rate[j] * prior_weight with evidence >= 0.
/// The default prior is the non-informative one: base_rate = 1/K, prior_weight = K,
/// so that alpha = evidence + 1.
class DirichletParams {
public:
    /// Wraps an alpha vector under the default prior.
    static DirichletParams from_alpha(Vector alpha);
    static DirichletParams from_alpha(Vector alpha, double prior_weight, Vector base_rate);

    std::span<const double> alpha() const { return alpha_; }
    double alpha(std::size_t j) const { return alpha_[j]; }
    std::span<const double> base_rate() const { return base_rate_; }
    double prior_weight() const { return prior_weight_; }
    std::size_t num_classes() const { return alpha_.size(); }

    double strength() const { return strength_; }
    double evidence(std::size_t j) const { return alpha_[j] - base_rate_[j] * prior_weight_; }
    Vector evidence() const;

private:
    DirichletParams(Vector alpha, double prior_weight, Vector base_rate);

    Vector alpha_;
    double prior_weight_;
    Vector base_rate_;
    double strength_;
};

Vector uniform_base_rate(std::size_t num_classes);

DirichletParams evidence_to_alpha(std::span<const double> evidence);
DirichletParams evidence_to_alpha(std::span<const double> evidence, double prior_weight,
                                  std::span<const double> base_rate);

Opinion alpha_to_opinion(const DirichletParams& params);

/// P(y) = b(y) + a(y) u.
Vector projected_probability(const Opinion& opinion);

/// Dirichlet mean alpha / S.
Vector expected_probability(const DirichletParams& params);

/// Uncertainty mass W / S.
double vacuity(const DirichletParams& params);

/// Relative mass balance of two belief masses; 1 for the 0/0 case.
double balance(double b_j, double b_i);

/// Dissonance of a belief-mass vector. Singletons whose complementary belief
/// mass is zero contribute nothing, and an all-zero belief vector has zero dissonance.
double dissonance(std::span<const double> belief);
double dissonance(const DirichletParams& params);

/// Log of the Dirichlet density at p (p strictly inside the simplex).
double dirichlet_log_density(std::span<const double> p, const DirichletParams& params);

}  // namespace renn
