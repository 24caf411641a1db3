#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "renn/network.hpp"

namespace renn {

struct Checkpoint {
    ModelParams model;
    /// Echo of the configuration the model was trained with (may be null).
    nlohmann::json config;
};

/// JSON document with layer_dims, head, seed, row-major weights and biases at
/// round-trip precision, and the config echo.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

/// Atomic: written to a temp file and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace renn
