#include "renn/run_config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "renn/errors.hpp"

namespace renn {

namespace {

template <typename T>
T get_as(const nlohmann::json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const nlohmann::json& value, const std::string& key) {
    if (!value.is_number_unsigned()) {
        throw ConfigError("config field '" + key + "' must be a nonnegative integer");
    }
    return value.get<std::size_t>();
}

double get_real(const nlohmann::json& value, const std::string& key) {
    if (!value.is_number()) {
        throw ConfigError("config field '" + key + "' must be a number");
    }
    return value.get<double>();
}

bool get_flag(const nlohmann::json& value, const std::string& key) {
    if (!value.is_boolean()) {
        throw ConfigError("config field '" + key + "' must be true or false");
    }
    return value.get<bool>();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("run config must be a JSON object");
    }
    RunConfig rc;
    TrainConfig& t = rc.train;
    for (const auto& [key, value] : doc.items()) {
        if (key == "variant") t.variant = parse_variant(get_as<std::string>(value, key));
        else if (key == "batch_size") t.batch_size = get_count(value, key);
        else if (key == "learning_rate") t.learning_rate = get_real(value, key);
        else if (key == "dropout_keep") t.dropout_keep = get_real(value, key);
        else if (key == "use_dropout") t.use_dropout = get_flag(value, key);
        else if (key == "weight_decay") t.weight_decay = get_real(value, key);
        else if (key == "lambda1") t.lambda1 = get_real(value, key);
        else if (key == "lambda2") t.lambda2 = get_real(value, key);
        else if (key == "epochs") t.epochs = get_count(value, key);
        else if (key == "seed") t.seed = get_count(value, key);
        else if (key == "architecture") {
            if (!value.is_array()) {
                throw ConfigError("config field 'architecture' must be a list of hidden-layer widths");
            }
            t.hidden_layers.clear();
            for (const auto& w : value) {
                t.hidden_layers.push_back(get_count(w, key));
            }
        }
        else if (key == "knn_k") t.knn_k = get_count(value, key);
        else if (key == "knn_metric") t.knn_metric = parse_metric(get_as<std::string>(value, key));
        else if (key == "bod_n") rc.bod_n = get_count(value, key);
        else if (key == "use_knn_kl") t.use_knn_kl = get_flag(value, key);
        else if (key == "kl_anneal_epochs") t.kl_anneal_epochs = get_count(value, key);
        else if (key == "evidence_activation") t.evidence_activation = parse_evidence_activation(get_as<std::string>(value, key));
        else throw ConfigError("unknown config field '" + key + "'");
    }
    if (rc.bod_n == 0) {
        throw ConfigError("bod_n must be positive");
    }
    t.validate();
    return rc;
}

nlohmann::json RunConfig::to_json() const {
    const TrainConfig& t = train;
    nlohmann::json doc;
    doc["variant"] = std::string(to_string(t.variant));
    doc["batch_size"] = t.batch_size;
    doc["learning_rate"] = t.learning_rate;
    doc["dropout_keep"] = t.dropout_keep;
    doc["use_dropout"] = t.use_dropout;
    doc["weight_decay"] = t.weight_decay;
    doc["lambda1"] = t.lambda1;
    doc["lambda2"] = t.lambda2;
    doc["epochs"] = t.epochs;
    doc["seed"] = t.seed;
    doc["architecture"] = t.hidden_layers;
    doc["knn_k"] = t.knn_k;
    doc["knn_metric"] = std::string(to_string(t.knn_metric));
    doc["bod_n"] = bod_n;
    doc["use_knn_kl"] = t.use_knn_kl;
    doc["kl_anneal_epochs"] = t.kl_anneal_epochs;
    doc["evidence_activation"] = std::string(to_string(t.evidence_activation));
    return doc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config '" + path.string() + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return RunConfig::from_json(doc);
}

}  // namespace renn
