#include "renn/trainer.hpp"

#include <cmath>
#include <string>

#include "renn/errors.hpp"
#include "renn/optimizer.hpp"
#include "renn/random.hpp"

namespace renn {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::L2: return "l2";
        case Variant::Enn: return "enn";
        case Variant::EnnVac: return "enn-vac";
        case Variant::EnnDiss: return "enn-diss";
        case Variant::EnnVacDiss: return "enn-vac-diss";
    }
    return "enn";
}

Variant parse_variant(std::string_view text) {
    for (Variant v : {Variant::L2, Variant::Enn, Variant::EnnVac, Variant::EnnDiss, Variant::EnnVacDiss}) {
        if (text == to_string(v)) {
            return v;
        }
    }
    throw ConfigError("unknown variant '" + std::string(text) + "' (expected l2, enn, enn-vac, enn-diss, enn-vac-diss)");
}

bool uses_vacuity(Variant v) { return v == Variant::EnnVac || v == Variant::EnnVacDiss; }
bool uses_dissonance(Variant v) { return v == Variant::EnnDiss || v == Variant::EnnVacDiss; }

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
    if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) throw ConfigError("dropout_keep must lie in (0, 1]");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be >= 0");
    if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw ConfigError("lambda1 must be finite and >= 0");
    if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw ConfigError("lambda2 must be finite and >= 0");
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (knn_k == 0) throw ConfigError("knn_k must be positive");
    for (std::size_t h : hidden_layers) {
        if (h == 0) throw ConfigError("hidden layer widths must be positive");
    }
    if (use_knn_kl && variant == Variant::L2) throw ConfigError("use_knn_kl applies to evidential variants only");
    loss_config().validate();
}

LossConfig TrainConfig::loss_config() const {
    LossConfig lc;
    lc.lambda1 = uses_vacuity(variant) ? lambda1 : 0.0;
    lc.lambda2 = uses_dissonance(variant) ? lambda2 : 0.0;
    lc.kl_anneal_epochs = kl_anneal_epochs;
    lc.use_knn_kl = use_knn_kl;
    lc.use_misleading_kl = true;
    return lc;
}

namespace {

void add_scaled(LossBreakdown& acc, const LossBreakdown& b, double w) {
    acc.ssl += w * b.ssl;
    acc.misleading_kl += w * b.misleading_kl;
    acc.vacuity_term += w * b.vacuity_term;
    acc.dissonance_term += w * b.dissonance_term;
    acc.knn_kl_term += w * b.knn_kl_term;
    acc.total += w * b.total;
}

}  // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    dataset.validate();
    if (dataset.num_classes < 2) {
        throw ConfigError("training needs at least two classes");
    }
    const std::vector<std::size_t> labeled = dataset.labeled_indices();
    if (labeled.empty()) {
        throw ConfigError("dataset has no labeled samples");
    }
    const bool vac = uses_vacuity(config.variant);
    if (vac && dataset.count(Partition::Ood) == 0) {
        throw ConfigError("variant " + std::string(to_string(config.variant)) + " needs OOD-tagged samples");
    }
    if (uses_dissonance(config.variant) && dataset.count(Partition::Bod) == 0) {
        throw ConfigError("variant " + std::string(to_string(config.variant)) + " needs BOD-tagged samples");
    }
    const std::vector<std::size_t> ood_pool = vac ? dataset.indices_of(Partition::Ood) : std::vector<std::size_t>{};
    const bool l2 = config.variant == Variant::L2;
    const LossConfig loss_cfg = config.loss_config();

    std::vector<std::optional<DirichletParams>> alpha_hat(dataset.size());
    if (config.use_knn_kl) {
        const auto neighbors = knn_all_labeled(dataset, config.knn_k, config.knn_metric);
        for (std::size_t i : labeled) {
            alpha_hat[i] = knn_alpha_from_neighbors(dataset, neighbors[i]);
        }
    }

    std::vector<std::size_t> dims{dataset.feature_dim};
    dims.insert(dims.end(), config.hidden_layers.begin(), config.hidden_layers.end());
    dims.push_back(dataset.num_classes);
    TrainResult result;
    result.model = init_model(dims, l2 ? Head::Softmax : Head::Evidence, config.seed, config.evidence_activation);
    ModelParams& model = result.model;
    AdamState adam = AdamState::for_model(model, config.learning_rate);

    const CounterRng shuffle_rng(config.seed, 0xba7c4);
    std::vector<std::size_t> order = labeled;
    std::vector<std::size_t> ood_order = ood_pool;
    std::size_t ood_cursor = ood_order.size();
    std::size_t ood_pass = 0;
    const auto n_features = static_cast<Eigen::Index>(dataset.feature_dim);
    const auto n_classes = static_cast<Eigen::Index>(dataset.num_classes);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(order, shuffle_rng, static_cast<std::uint64_t>(epoch) << 32);
        const double lambda_t = kl_annealing(epoch, config.kl_anneal_epochs);
        LossBreakdown epoch_loss;
        std::size_t n_batches = 0;

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t n_lab = std::min(config.batch_size, order.size() - start);
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(start + n_lab));
            if (!ood_pool.empty()) {
                const std::size_t n_ood = (n_lab * ood_pool.size() + labeled.size() - 1) / labeled.size();
                for (std::size_t j = 0; j < n_ood; ++j) {
                    if (ood_cursor == ood_order.size()) {
                        shuffle_indices(ood_order, CounterRng(config.seed, 0x00d), (ood_pass++) << 32);
                        ood_cursor = 0;
                    }
                    batch.push_back(ood_order[ood_cursor++]);
                }
            }

            Eigen::MatrixXd inputs(n_features, static_cast<Eigen::Index>(batch.size()));
            for (std::size_t c = 0; c < batch.size(); ++c) {
                const auto& f = dataset.samples[batch[c]].features;
                inputs.col(static_cast<Eigen::Index>(c)) =
                    Eigen::Map<const Eigen::VectorXd>(f.data(), n_features);
            }
            ForwardCache cache;
            DropoutSpec dropout{config.dropout_keep, config.seed, adam.step_count};
            const Eigen::MatrixXd out = forward(model, inputs, &cache, config.use_dropout ? &dropout : nullptr);
            Eigen::MatrixXd grad_out(n_classes, static_cast<Eigen::Index>(batch.size()));
            LossBreakdown batch_loss;

            if (l2) {
                const double inv = 1.0 / static_cast<double>(batch.size());
                for (std::size_t c = 0; c < batch.size(); ++c) {
                    const auto col = static_cast<Eigen::Index>(c);
                    const std::size_t label = *dataset.samples[batch[c]].label;
                    batch_loss.ssl -= inv * std::log(std::max(out(static_cast<Eigen::Index>(label), col), 1e-300));
                    grad_out.col(col) = out.col(col) * inv;
                    grad_out(static_cast<Eigen::Index>(label), col) -= inv;
                }
                batch_loss.total = batch_loss.ssl + weight_penalty(model, config.weight_decay);
            } else {
                std::vector<LossSample> samples;
                samples.reserve(batch.size());
                for (std::size_t c = 0; c < batch.size(); ++c) {
                    const Sample& s = dataset.samples[batch[c]];
                    Vector alpha(static_cast<std::size_t>(n_classes));
                    for (Eigen::Index j = 0; j < n_classes; ++j) {
                        alpha[static_cast<std::size_t>(j)] = out(j, static_cast<Eigen::Index>(c)) + 1.0;
                    }
                    samples.push_back(LossSample{DirichletParams::from_alpha(std::move(alpha)), s.label, s.partition,
                                                 alpha_hat[batch[c]]});
                }
                LossResult lr = total_loss_with_grad(samples, loss_cfg, lambda_t);
                batch_loss = lr.breakdown;
                batch_loss.total += weight_penalty(model, config.weight_decay);
                for (std::size_t c = 0; c < batch.size(); ++c) {
                    for (Eigen::Index j = 0; j < n_classes; ++j) {
                        grad_out(j, static_cast<Eigen::Index>(c)) = lr.grad_alpha[c][static_cast<std::size_t>(j)];
                    }
                }
            }

            Gradients grads = backward(model, cache, grad_out);
            add_weight_decay(grads, model, config.weight_decay);
            try {
                adam_step(model, grads, adam);
            } catch (const TrainingError& e) {
                throw TrainingError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch starting at sample " +
                                    std::to_string(batch.front()) + ")");
            }
            add_scaled(epoch_loss, batch_loss, 1.0);
            ++n_batches;
        }
        LossBreakdown mean;
        add_scaled(mean, epoch_loss, 1.0 / static_cast<double>(n_batches));
        result.history.push_back(mean);
        if (on_epoch) {
            on_epoch(epoch, mean);
        }
    }
    return result;
}

}  // namespace renn
