#include "renn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "renn/dataset.hpp"
#include "renn/errors.hpp"

namespace renn {

namespace {
constexpr const char* kFormatTag = "renn-checkpoint";
constexpr int kFormatVersion = 1;
}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
    const ModelParams& m = checkpoint.model;
    m.validate();
    nlohmann::json doc;
    doc["format"] = kFormatTag;
    doc["version"] = kFormatVersion;
    doc["layer_dims"] = m.layer_dims;
    doc["head"] = std::string(to_string(m.head));
    doc["evidence_activation"] = std::string(to_string(m.evidence_activation));
    doc["seed"] = m.seed;
    doc["weights"] = nlohmann::json::array();
    doc["biases"] = nlohmann::json::array();
    for (std::size_t i = 0; i < m.num_layers(); ++i) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(m.weights[i].size()));
        for (Eigen::Index r = 0; r < m.weights[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < m.weights[i].cols(); ++c) {
                flat.push_back(m.weights[i](r, c));
            }
        }
        doc["weights"].push_back(flat);
        doc["biases"].push_back(std::vector<double>(m.biases[i].data(), m.biases[i].data() + m.biases[i].size()));
    }
    doc["config"] = checkpoint.config;
    return doc.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
    Checkpoint cp;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format") != kFormatTag || doc.at("version") != kFormatVersion) {
            throw FormatError("not a version-1 renn checkpoint");
        }
        ModelParams& m = cp.model;
        m.layer_dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
        m.head = parse_head(doc.at("head").get<std::string>());
        m.evidence_activation = parse_evidence_activation(doc.at("evidence_activation").get<std::string>());
        m.seed = doc.at("seed").get<std::uint64_t>();
        const auto& weights = doc.at("weights");
        const auto& biases = doc.at("biases");
        if (m.layer_dims.size() < 2 || weights.size() + 1 != m.layer_dims.size() || biases.size() != weights.size()) {
            throw FormatError("checkpoint layer count does not match layer_dims");
        }
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const auto rows = static_cast<Eigen::Index>(m.layer_dims[i + 1]);
            const auto cols = static_cast<Eigen::Index>(m.layer_dims[i]);
            const auto flat = weights[i].get<std::vector<double>>();
            const auto bias = biases[i].get<std::vector<double>>();
            if (flat.size() != static_cast<std::size_t>(rows * cols) || bias.size() != static_cast<std::size_t>(rows)) {
                throw FormatError("checkpoint layer " + std::to_string(i) + " has the wrong number of values");
            }
            Eigen::MatrixXd w(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
                }
            }
            m.weights.push_back(std::move(w));
            m.biases.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), rows));
        }
        cp.config = doc.contains("config") ? doc["config"] : nlohmann::json();
        m.validate();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("malformed checkpoint: ") + e.what());
    }
    return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    write_file_atomically(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_checkpoint(buf.str());
}

}  // namespace renn
