#include "renn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "renn/errors.hpp"
#include "renn/special_functions.hpp"

namespace renn {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void check_label(const DirichletParams& alpha, std::size_t label) {
    if (label >= alpha.num_classes()) {
        throw DomainError("label " + std::to_string(label) + " out of range");
    }
}

void check_same_length(std::span<const double> alpha, std::span<const double> beta) {
    if (alpha.size() != beta.size()) {
        throw DomainError("Dirichlet parameter vectors differ in length");
    }
    if (alpha.empty()) {
        throw DomainError("empty Dirichlet parameter vector");
    }
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (!(alpha[j] > 0.0) || !(beta[j] > 0.0)) {
            throw DomainError("Dirichlet parameters must be strictly positive");
        }
    }
}

// alpha with the true-class evidence removed (the prior mass stays).
Vector misleading_alpha(const DirichletParams& alpha, std::size_t label) {
    Vector tilde(alpha.alpha().begin(), alpha.alpha().end());
    tilde[label] = alpha.base_rate()[label] * alpha.prior_weight();
    return tilde;
}

}  // namespace

void LossConfig::validate() const {
    if (!std::isfinite(lambda1) || lambda1 < 0.0) {
        throw ConfigError("lambda1 must be finite and >= 0");
    }
    if (!std::isfinite(lambda2) || lambda2 < 0.0) {
        throw ConfigError("lambda2 must be finite and >= 0");
    }
    if (kl_anneal_epochs == 0) {
        throw ConfigError("kl_anneal_epochs must be positive");
    }
}

double kl_annealing(std::size_t epoch, std::size_t kl_anneal_epochs) {
    if (kl_anneal_epochs == 0) {
        return 1.0;
    }
    return std::min(1.0, static_cast<double>(epoch) / static_cast<double>(kl_anneal_epochs));
}

Vector one_hot(std::size_t num_classes, std::size_t label) {
    if (label >= num_classes) {
        throw DomainError("label out of range");
    }
    Vector y(num_classes, 0.0);
    y[label] = 1.0;
    return y;
}

std::size_t one_hot_label(std::span<const double> y) {
    std::size_t hot = y.size();
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] == 1.0 && hot == y.size()) {
            hot = j;
        } else if (y[j] != 0.0) {
            throw DomainError("target vector is not one-hot");
        }
    }
    if (hot == y.size()) {
        throw DomainError("target vector is not one-hot");
    }
    return hot;
}

double ssl_loss(const DirichletParams& alpha, std::span<const double> y) {
    if (y.size() != alpha.num_classes()) {
        throw DomainError("target length does not match alpha");
    }
    return ssl_loss(alpha, one_hot_label(y));
}

double ssl_loss(const DirichletParams& alpha, std::size_t label) {
    check_label(alpha, label);
    const double s = alpha.strength();
    const double denom = s * (s + 1.0);
    double loss = 0.0;
    for (std::size_t j = 0; j < alpha.num_classes(); ++j) {
        const double a = alpha.alpha(j);
        const double y = j == label ? 1.0 : 0.0;
        const double mean = a / s;
        const double second_moment = a * (a + 1.0) / denom;
        loss += y * y - 2.0 * y * mean + second_moment;
    }
    return loss;
}

Vector ssl_grad_alpha(const DirichletParams& alpha, std::span<const double> y) {
    if (y.size() != alpha.num_classes()) {
        throw DomainError("target length does not match alpha");
    }
    return ssl_grad_alpha(alpha, one_hot_label(y));
}

Vector ssl_grad_alpha(const DirichletParams& alpha, std::size_t label) {
    check_label(alpha, label);
    const double s = alpha.strength();
    const double denom = s * (s + 1.0);
    double q = s;
    for (double a : alpha.alpha()) {
        q += a * a;
    }
    const double mean_true = alpha.alpha(label) / s;
    const double q_term = q * (2.0 * s + 1.0) / (denom * denom);
    Vector grad(alpha.num_classes());
    for (std::size_t k = 0; k < grad.size(); ++k) {
        const double d_mean = ((k == label ? 1.0 : 0.0) - mean_true) / s;
        grad[k] = -2.0 * d_mean + (2.0 * alpha.alpha(k) + 1.0) / denom - q_term;
    }
    return grad;
}

double kl_dirichlet(std::span<const double> alpha, std::span<const double> beta) {
    check_same_length(alpha, beta);
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        sa += alpha[j];
        sb += beta[j];
    }
    const double psi_sa = digamma(sa);
    double kl = std::lgamma(sa) - std::lgamma(sb);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        kl += std::lgamma(beta[j]) - std::lgamma(alpha[j]) + (alpha[j] - beta[j]) * (digamma(alpha[j]) - psi_sa);
    }
    return kl;
}

Vector kl_dirichlet_grad(std::span<const double> alpha, std::span<const double> beta) {
    check_same_length(alpha, beta);
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        sa += alpha[j];
        sb += beta[j];
    }
    const double shared = trigamma(sa) * (sa - sb);
    Vector grad(alpha.size());
    for (std::size_t k = 0; k < grad.size(); ++k) {
        grad[k] = (alpha[k] - beta[k]) * trigamma(alpha[k]) - shared;
    }
    return grad;
}

double misleading_kl(const DirichletParams& alpha, std::span<const double> y) {
    if (y.size() != alpha.num_classes()) {
        throw DomainError("target length does not match alpha");
    }
    return misleading_kl(alpha, one_hot_label(y));
}

double misleading_kl(const DirichletParams& alpha, std::size_t label) {
    check_label(alpha, label);
    const Vector tilde = misleading_alpha(alpha, label);
    const Vector ones(tilde.size(), 1.0);
    return kl_dirichlet(tilde, ones);
}

Vector misleading_kl_grad(const DirichletParams& alpha, std::size_t label) {
    check_label(alpha, label);
    const Vector tilde = misleading_alpha(alpha, label);
    const Vector ones(tilde.size(), 1.0);
    Vector grad = kl_dirichlet_grad(tilde, ones);
    grad[label] = 0.0;
    return grad;
}

double vacuity_reg(const DirichletParams& alpha) { return vacuity(alpha); }

Vector vacuity_reg_grad(const DirichletParams& alpha) {
    const double s = alpha.strength();
    return Vector(alpha.num_classes(), -alpha.prior_weight() / (s * s));
}

double dissonance_reg(const DirichletParams& alpha) { return dissonance(alpha); }

Vector dissonance_reg_grad(const DirichletParams& alpha) {
    const std::size_t k = alpha.num_classes();
    const double s = alpha.strength();
    Vector b(k);
    for (std::size_t j = 0; j < k; ++j) {
        b[j] = alpha.evidence(j) / s;
    }

    // Partials of the dissonance with respect to the belief masses.
    Vector g(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (b[i] == 0.0) {
            continue;
        }
        double others = 0.0;
        double weighted = 0.0;
        double d_weighted_d_bi = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) {
                continue;
            }
            others += b[j];
            weighted += b[j] * balance(b[j], b[i]);
            const double pair = b[j] + b[i];
            d_weighted_d_bi += b[j] * sign(b[j] - b[i]) * 2.0 * b[j] / (pair * pair);
        }
        if (others == 0.0) {
            // Every other mass is zero: the term grows like 2 * b_k for each b_k leaving zero.
            for (std::size_t j = 0; j < k; ++j) {
                if (j != i) {
                    g[j] += 2.0;
                }
            }
            continue;
        }
        const double ratio = weighted / others;
        g[i] += ratio + b[i] * d_weighted_d_bi / others;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) {
                continue;
            }
            const double pair = b[j] + b[i];
            const double d_bal_d_bj = -sign(b[j] - b[i]) * 2.0 * b[i] / (pair * pair);
            const double d_weighted_d_bj = balance(b[j], b[i]) + b[j] * d_bal_d_bj;
            g[j] += b[i] * (d_weighted_d_bj - ratio) / others;
        }
    }

    // db_j / dalpha_m = (delta_jm - b_j) / S
    double gb = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        gb += g[j] * b[j];
    }
    Vector grad(k);
    for (std::size_t m = 0; m < k; ++m) {
        grad[m] = (g[m] - gb) / s;
    }
    return grad;
}

double knn_kl_reg(const DirichletParams& alpha, const DirichletParams& alpha_hat) {
    return kl_dirichlet(alpha.alpha(), alpha_hat.alpha());
}

Vector knn_kl_reg_grad(const DirichletParams& alpha, const DirichletParams& alpha_hat) {
    return kl_dirichlet_grad(alpha.alpha(), alpha_hat.alpha());
}

namespace {

struct GroupSizes {
    std::size_t labeled = 0;
    std::size_t ood = 0;
    std::size_t bod = 0;
};

GroupSizes check_partitions(std::span<const LossSample> batch, const LossConfig& config) {
    GroupSizes n;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const LossSample& s = batch[i];
        if (s.partition == Partition::Ood) {
            if (s.label) {
                throw InternalError("OOD sample " + std::to_string(i) + " carries a label; it would enter the SSL term");
            }
            ++n.ood;
            continue;
        }
        if (!s.label) {
            throw InternalError("labeled-partition sample " + std::to_string(i) + " has no label");
        }
        check_label(s.alpha, *s.label);
        if (config.use_knn_kl && !s.alpha_hat) {
            throw InternalError("k-NN KL enabled but sample " + std::to_string(i) + " has no neighbour estimate");
        }
        ++n.labeled;
        if (s.partition == Partition::Bod) {
            ++n.bod;
        }
    }
    return n;
}

LossResult evaluate(std::span<const LossSample> batch, const LossConfig& config, double lambda_t, bool with_grad) {
    config.validate();
    if (!(lambda_t >= 0.0 && lambda_t <= 1.0)) {
        throw DomainError("lambda_t must lie in [0, 1]");
    }
    const GroupSizes n = check_partitions(batch, config);
    const double inv_labeled = n.labeled ? 1.0 / static_cast<double>(n.labeled) : 0.0;
    const double inv_ood = n.ood ? 1.0 / static_cast<double>(n.ood) : 0.0;
    const double inv_bod = n.bod ? 1.0 / static_cast<double>(n.bod) : 0.0;

    LossResult result;
    LossBreakdown& out = result.breakdown;
    if (with_grad) {
        result.grad_alpha.reserve(batch.size());
    }

    for (const LossSample& s : batch) {
        Vector grad;
        if (with_grad) {
            grad.assign(s.alpha.num_classes(), 0.0);
        }
        auto accumulate = [&grad](const Vector& term, double weight) {
            for (std::size_t j = 0; j < grad.size(); ++j) {
                grad[j] += weight * term[j];
            }
        };

        if (s.partition == Partition::Ood) {
            out.vacuity_term += vacuity_reg(s.alpha) * inv_ood;
            if (with_grad) {
                accumulate(vacuity_reg_grad(s.alpha), -config.lambda1 * inv_ood);
            }
        } else {
            const std::size_t label = *s.label;
            out.ssl += ssl_loss(s.alpha, label) * inv_labeled;
            if (with_grad) {
                accumulate(ssl_grad_alpha(s.alpha, label), inv_labeled);
            }
            if (config.use_misleading_kl) {
                out.misleading_kl += misleading_kl(s.alpha, label) * inv_labeled;
                if (with_grad) {
                    accumulate(misleading_kl_grad(s.alpha, label), lambda_t * inv_labeled);
                }
            }
            if (config.use_knn_kl) {
                out.knn_kl_term += knn_kl_reg(s.alpha, *s.alpha_hat) * inv_labeled;
                if (with_grad) {
                    accumulate(knn_kl_reg_grad(s.alpha, *s.alpha_hat), inv_labeled);
                }
            }
            if (s.partition == Partition::Bod) {
                out.dissonance_term += dissonance_reg(s.alpha) * inv_bod;
                if (with_grad) {
                    accumulate(dissonance_reg_grad(s.alpha), -config.lambda2 * inv_bod);
                }
            }
        }
        if (with_grad) {
            result.grad_alpha.push_back(std::move(grad));
        }
    }
    out.total = out.ssl + lambda_t * out.misleading_kl - config.lambda1 * out.vacuity_term -
                config.lambda2 * out.dissonance_term + out.knn_kl_term;
    return result;
}

}  // namespace

LossBreakdown total_loss(std::span<const LossSample> batch, const LossConfig& config, double lambda_t) {
    return evaluate(batch, config, lambda_t, false).breakdown;
}

LossResult total_loss_with_grad(std::span<const LossSample> batch, const LossConfig& config, double lambda_t) {
    return evaluate(batch, config, lambda_t, true);
}

}  // namespace renn
