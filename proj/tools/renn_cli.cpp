// Command-line front end: synthetic data, boundary-sample selection, training and evaluation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renn/checkpoint.hpp"
#include "renn/cifar10.hpp"
#include "renn/dataset.hpp"
#include "renn/errors.hpp"
#include "renn/metrics.hpp"
#include "renn/neighbors.hpp"
#include "renn/run_config.hpp"
#include "renn/svg.hpp"
#include "renn/synthetic.hpp"
#include "renn/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void write_text(const std::optional<std::string>& path, const std::string& contents) {
    if (path) {
        renn::write_file_atomically(*path, contents);
    } else {
        std::cout << contents;
    }
}

renn::Metric resolve_metric(const std::string& name, const renn::Dataset& ds) {
    if (name == "auto") {
        // Cosine ranks by angle only, which is degenerate for low-dimensional features around the origin.
        return ds.feature_dim > 16 ? renn::Metric::Cosine : renn::Metric::Euclidean;
    }
    return renn::parse_metric(name);
}

struct GenDataArgs {
    std::uint64_t seed = 0;
    std::string out;
    std::size_t n_per_class = 1000;
    std::size_t n_per_ood = 100;
};

int run_gen_data(const GenDataArgs& a) {
    const auto ds = renn::gen_synthetic(a.seed, a.n_per_class, a.n_per_ood);
    renn::write_dataset_csv(a.out, ds);
    return kExitOk;
}

struct SelectBodArgs {
    std::string data;
    std::size_t k = 10;
    std::size_t n = 500;
    std::string metric = "auto";
    std::string out;
};

int run_select_bod(const SelectBodArgs& a) {
    const auto ds = renn::read_dataset_csv(a.data);
    const auto ids = renn::select_bod(ds, a.k, a.n, resolve_metric(a.metric, ds));
    renn::write_index_file(a.out, ids);
    return kExitOk;
}

struct LoadCifarArgs {
    std::string path;
    std::vector<std::string> classes{"airplane", "automobile", "bird", "cat", "deer"};
    std::vector<std::string> ood_classes;
    std::size_t max_per_class = 100;
    std::string out;
};

int run_load_cifar(const LoadCifarArgs& a) {
    renn::Dataset ds = renn::load_cifar10(a.path, a.classes, a.max_per_class);
    if (!a.ood_classes.empty()) {
        const renn::Dataset ood = renn::load_cifar10(a.path, a.ood_classes, a.max_per_class);
        for (auto s : ood.samples) {
            s.label.reset();
            s.partition = renn::Partition::Ood;
            ds.samples.push_back(std::move(s));
        }
    }
    renn::write_dataset_csv(a.out, ds);
    return kExitOk;
}

struct TrainArgs {
    std::optional<std::string> config;
    std::string data;
    std::optional<std::string> bod;
    std::string out;
    std::optional<std::string> loss_log;
    std::optional<std::string> variant;
    std::optional<std::size_t> epochs;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> batch_size;
    std::optional<double> learning_rate;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    bool use_knn_kl = false;
    bool verbose = false;
};

int run_train(const TrainArgs& a) {
    renn::RunConfig rc = a.config ? renn::load_run_config(*a.config) : renn::RunConfig{};
    renn::TrainConfig& t = rc.train;
    if (a.variant) t.variant = renn::parse_variant(*a.variant);
    if (a.epochs) t.epochs = *a.epochs;
    if (a.seed) t.seed = *a.seed;
    if (a.batch_size) t.batch_size = *a.batch_size;
    if (a.learning_rate) t.learning_rate = *a.learning_rate;
    if (a.lambda1) t.lambda1 = *a.lambda1;
    if (a.lambda2) t.lambda2 = *a.lambda2;
    if (a.use_knn_kl) t.use_knn_kl = true;
    t.validate();

    renn::Dataset ds = renn::read_dataset_csv(a.data);
    if (a.bod) {
        const auto bod = renn::read_index_file(*a.bod);
        const auto ood = ds.indices_of(renn::Partition::Ood);
        ds = renn::partition(ds, ood, bod);
    }

    renn::EpochCallback progress;
    if (a.verbose) {
        progress = [](std::size_t epoch, const renn::LossBreakdown& b) {
            if (epoch % 10 == 0) {
                std::cerr << "epoch " << epoch << " total " << b.total << '\n';
            }
        };
    }
    const renn::TrainResult result = renn::train(ds, t, progress);

    renn::save_checkpoint(a.out, renn::Checkpoint{result.model, rc.to_json()});

    std::ostringstream log;
    log << "epoch,ssl,misleading_kl,vacuity_term,dissonance_term,knn_kl_term,total\n";
    for (std::size_t e = 0; e < result.history.size(); ++e) {
        const auto& b = result.history[e];
        log << e << ',' << renn::format_double(b.ssl) << ',' << renn::format_double(b.misleading_kl) << ','
            << renn::format_double(b.vacuity_term) << ',' << renn::format_double(b.dissonance_term) << ','
            << renn::format_double(b.knn_kl_term) << ',' << renn::format_double(b.total) << '\n';
    }
    renn::write_file_atomically(a.loss_log.value_or(a.out + ".loss.csv"), log.str());
    return kExitOk;
}

struct GridArgs {
    std::string model;
    double min = -10.0;
    double max = 10.0;
    std::size_t res = 200;
    std::string channel = "vacuity";
    std::optional<std::string> svg;
    std::optional<std::string> out;
};

int run_eval_grid(const GridArgs& a) {
    const renn::Channel channel = renn::parse_channel(a.channel);
    const auto cp = renn::load_checkpoint(a.model);
    const auto records = renn::uncertainty_grid(cp.model, a.min, a.max, a.res);
    std::ostringstream csv;
    renn::write_grid_csv(csv, records);
    write_text(a.out, csv.str());
    if (a.svg) {
        nlohmann::json echo{{"command", "eval grid"}, {"min", a.min},         {"max", a.max},
                            {"res", a.res},           {"channel", a.channel}, {"model_config", cp.config}};
        renn::write_file_atomically(*a.svg, renn::render_grid_svg(records, channel, cp.model.num_classes(),
                                                                  std::string(renn::to_string(channel)), echo.dump()));
    }
    return kExitOk;
}

struct CdfArgs {
    std::string model;
    std::string data;
    std::string partition = "all";
    std::size_t thresholds = 200;
    std::optional<std::string> svg;
    std::optional<std::string> out;
};

int run_eval_cdf(const CdfArgs& a) {
    const auto cp = renn::load_checkpoint(a.model);
    renn::Dataset ds = renn::read_dataset_csv(a.data, cp.model.num_classes());
    if (a.partition != "all") {
        const renn::Partition keep = renn::parse_partition(a.partition);
        std::erase_if(ds.samples, [keep](const renn::Sample& s) { return s.partition != keep; });
    }
    if (ds.samples.empty()) {
        throw renn::DomainError("no samples left to evaluate");
    }
    const double max_entropy = std::log(static_cast<double>(cp.model.num_classes()));
    const auto curve = renn::empirical_cdf(renn::dataset_entropies(cp.model, ds), max_entropy, a.thresholds);
    std::ostringstream csv;
    renn::write_cdf_csv(csv, curve);
    write_text(a.out, csv.str());
    if (a.svg) {
        nlohmann::json echo{{"command", "eval cdf"}, {"partition", a.partition}, {"thresholds", a.thresholds},
                            {"model_config", cp.config}};
        const std::string label = cp.config.is_object() && cp.config.contains("variant")
                                      ? cp.config["variant"].get<std::string>()
                                      : std::string(renn::to_string(cp.model.head));
        const std::vector<renn::CdfSeries> series{{label, curve}};
        renn::write_file_atomically(*a.svg, renn::render_cdf_svg(series, max_entropy, {}, echo.dump()));
    }
    return kExitOk;
}

struct AccuracyArgs {
    std::string model;
    std::string data;
};

int run_eval_accuracy(const AccuracyArgs& a) {
    const auto cp = renn::load_checkpoint(a.model);
    renn::Dataset ds = renn::read_dataset_csv(a.data, cp.model.num_classes());
    std::erase_if(ds.samples, [](const renn::Sample& s) { return !s.label; });
    std::cout << renn::format_double(renn::accuracy(cp.model, ds)) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized evidential neural networks: data, training and uncertainty evaluation"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate the synthetic 3-class mixture with OOD clusters");
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Output dataset CSV")->required();
    gen_cmd->add_option("--n-per-class", gen.n_per_class, "Samples per class")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--n-per-ood", gen.n_per_ood, "Samples per OOD cluster")->check(CLI::PositiveNumber);

    SelectBodArgs sel;
    auto* sel_cmd = app.add_subcommand("select-bod", "Select boundary samples by k-NN dissonance");
    sel_cmd->add_option("--data", sel.data, "Dataset CSV")->required();
    sel_cmd->add_option("--k", sel.k, "Neighbours per sample")->check(CLI::PositiveNumber);
    sel_cmd->add_option("--n", sel.n, "Number of boundary samples")->check(CLI::PositiveNumber);
    sel_cmd->add_option("--metric", sel.metric, "cosine, euclidean or auto")
        ->check(CLI::IsMember({"auto", "cosine", "euclidean"}));
    sel_cmd->add_option("--out", sel.out, "Output index file")->required();

    LoadCifarArgs cifar;
    auto* cifar_cmd = app.add_subcommand("load-cifar", "Convert a CIFAR-10 binary subsample to dataset CSV");
    cifar_cmd->add_option("--path", cifar.path, "Batch file or directory of data_batch_*.bin")->required();
    cifar_cmd->add_option("--classes", cifar.classes, "In-distribution classes")->delimiter(',');
    cifar_cmd->add_option("--ood-classes", cifar.ood_classes, "Classes tagged OOD (labels dropped)")->delimiter(',');
    cifar_cmd->add_option("--max-per-class", cifar.max_per_class, "Cap per class")->check(CLI::PositiveNumber);
    cifar_cmd->add_option("--out", cifar.out, "Output dataset CSV")->required();

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train one comparison scheme");
    train_cmd->add_option("--config", tr.config, "JSON run config");
    train_cmd->add_option("--data", tr.data, "Dataset CSV")->required();
    train_cmd->add_option("--bod", tr.bod, "Boundary index file");
    train_cmd->add_option("--out", tr.out, "Output checkpoint")->required();
    train_cmd->add_option("--loss-log", tr.loss_log, "Loss log CSV (default: <out>.loss.csv)");
    train_cmd->add_option("--variant", tr.variant, "Override: l2, enn, enn-vac, enn-diss, enn-vac-diss");
    train_cmd->add_option("--epochs", tr.epochs, "Override epochs")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", tr.seed, "Override seed");
    train_cmd->add_option("--batch-size", tr.batch_size, "Override batch size")->check(CLI::PositiveNumber);
    train_cmd->add_option("--learning-rate", tr.learning_rate, "Override learning rate");
    train_cmd->add_option("--lambda1", tr.lambda1, "Override vacuity weight");
    train_cmd->add_option("--lambda2", tr.lambda2, "Override dissonance weight");
    train_cmd->add_flag("--use-knn-kl", tr.use_knn_kl, "Enable the k-NN Dirichlet KL term");
    train_cmd->add_flag("--verbose", tr.verbose, "Print progress to stderr");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model");
    eval_cmd->require_subcommand(1);

    GridArgs grid;
    auto* grid_cmd = eval_cmd->add_subcommand("grid", "Uncertainty grid over a square region");
    grid_cmd->add_option("--model", grid.model, "Checkpoint")->required();
    grid_cmd->add_option("--min", grid.min, "Lower bound of both axes");
    grid_cmd->add_option("--max", grid.max, "Upper bound of both axes");
    grid_cmd->add_option("--res", grid.res, "Points per axis")->check(CLI::Range(2, 100000));
    grid_cmd->add_option("--channel", grid.channel, "SVG channel: vacuity, dissonance, entropy, class");
    grid_cmd->add_option("--svg", grid.svg, "Heatmap SVG output");
    grid_cmd->add_option("--out", grid.out, "Grid CSV output (default: stdout)");

    CdfArgs cdf;
    auto* cdf_cmd = eval_cmd->add_subcommand("cdf", "Empirical CDF of predictive entropy");
    cdf_cmd->add_option("--model", cdf.model, "Checkpoint")->required();
    cdf_cmd->add_option("--data", cdf.data, "Dataset CSV")->required();
    cdf_cmd->add_option("--partition", cdf.partition, "IN, OOD, BOD or all")
        ->check(CLI::IsMember({"all", "IN", "OOD", "BOD"}));
    cdf_cmd->add_option("--thresholds", cdf.thresholds, "Number of thresholds")->check(CLI::Range(2, 1000000));
    cdf_cmd->add_option("--svg", cdf.svg, "Chart SVG output");
    cdf_cmd->add_option("--out", cdf.out, "CDF CSV output (default: stdout)");

    AccuracyArgs acc;
    auto* acc_cmd = eval_cmd->add_subcommand("accuracy", "Accuracy on the labeled samples");
    acc_cmd->add_option("--model", acc.model, "Checkpoint")->required();
    acc_cmd->add_option("--data", acc.data, "Dataset CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen_cmd) return run_gen_data(gen);
        if (*sel_cmd) return run_select_bod(sel);
        if (*cifar_cmd) return run_load_cifar(cifar);
        if (*train_cmd) return run_train(tr);
        if (*grid_cmd) return run_eval_grid(grid);
        if (*cdf_cmd) return run_eval_cdf(cdf);
        if (*acc_cmd) return run_eval_accuracy(acc);
    } catch (const renn::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const renn::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
