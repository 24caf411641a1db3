#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "renn/partition.hpp"
#include "renn/subjective_logic.hpp"

namespace renn {

/// Coefficients of the regularized evidential objective.
struct LossConfig {
    double lambda1 = 0.0;  // vacuity reward on OOD samples
    double lambda2 = 0.0;  // dissonance reward on boundary samples
    std::size_t kl_anneal_epochs = 10;
    bool use_knn_kl = false;
    bool use_misleading_kl = true;

    void validate() const;
};

/// Per-term means of one evaluation of the objective.
///
/// total = ssl + lambda_t * misleading_kl - lambda1 * vacuity_term
///         - lambda2 * dissonance_term + knn_kl_term
struct LossBreakdown {
    double ssl = 0.0;
    double misleading_kl = 0.0;
    double vacuity_term = 0.0;
    double dissonance_term = 0.0;
    double knn_kl_term = 0.0;
    double total = 0.0;
};

/// lambda_t = min(1, epoch / kl_anneal_epochs), epochs counted from 0.
double kl_annealing(std::size_t epoch, std::size_t kl_anneal_epochs);

Vector one_hot(std::size_t num_classes, std::size_t label);
/// Index of the hot entry; DomainError unless y is exactly one-hot.
std::size_t one_hot_label(std::span<const double> y);

// Expected squared error under Dir(alpha), in closed form from the first two moments.
double ssl_loss(const DirichletParams& alpha, std::span<const double> y);
double ssl_loss(const DirichletParams& alpha, std::size_t label);
Vector ssl_grad_alpha(const DirichletParams& alpha, std::span<const double> y);
Vector ssl_grad_alpha(const DirichletParams& alpha, std::size_t label);

/// KL(Dir(alpha) || Dir(beta)).
double kl_dirichlet(std::span<const double> alpha, std::span<const double> beta);
/// Gradient of kl_dirichlet with respect to alpha.
Vector kl_dirichlet_grad(std::span<const double> alpha, std::span<const double> beta);

/// KL(Dir(alpha~) || Dir(1)) where alpha~ has the true-class evidence removed.
double misleading_kl(const DirichletParams& alpha, std::span<const double> y);
double misleading_kl(const DirichletParams& alpha, std::size_t label);
Vector misleading_kl_grad(const DirichletParams& alpha, std::size_t label);

double vacuity_reg(const DirichletParams& alpha);
Vector vacuity_reg_grad(const DirichletParams& alpha);

double dissonance_reg(const DirichletParams& alpha);
/// Chain rule through b = r / S. |b_j - b_i| uses sign(0) = 0 at ties. Where every
/// other belief mass of singleton i is zero, the one-sided partial (increasing evidence)
/// is used, which is the direction reachable from nonnegative evidence.
Vector dissonance_reg_grad(const DirichletParams& alpha);

double knn_kl_reg(const DirichletParams& alpha, const DirichletParams& alpha_hat);
Vector knn_kl_reg_grad(const DirichletParams& alpha, const DirichletParams& alpha_hat);

/// One network output entering the objective.
struct LossSample {
    DirichletParams alpha;
    std::optional<std::size_t> label;
    Partition partition = Partition::In;
    /// Neighbour-estimated Dirichlet; required for labeled samples when use_knn_kl is set.
    std::optional<DirichletParams> alpha_hat;
};

struct LossResult {
    LossBreakdown breakdown;
    /// d total / d alpha for every sample, in input order.
    std::vector<Vector> grad_alpha;
};

/// Regularized objective over a batch. Labeled terms (SSL, misleading KL, k-NN KL) average
/// over IN and BOD samples, the vacuity term over OOD samples and the dissonance term over
/// BOD samples. Empty groups contribute zero. Reduction is sequential in sample order.
LossBreakdown total_loss(std::span<const LossSample> batch, const LossConfig& config, double lambda_t);
LossResult total_loss_with_grad(std::span<const LossSample> batch, const LossConfig& config, double lambda_t);

}  // namespace renn
