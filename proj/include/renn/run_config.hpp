#pragma once

#include <cstddef>

#include <json.hpp>

#include "renn/trainer.hpp"

namespace renn {

/// Everything a pipeline run needs: the training configuration plus BOD selection size.
struct RunConfig {
    TrainConfig train;
    std::size_t bod_n = 500;

    /// Strict parse: unknown keys and wrongly-typed values throw ConfigError.
    /// Missing keys keep their defaults.
    static RunConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace renn
