#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "renn/dataset.hpp"

namespace renn {

inline constexpr std::size_t kCifarImageBytes = 3 * 32 * 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + kCifarImageBytes;

inline constexpr std::array<std::string_view, 10> kCifarClassNames{
    "airplane", "automobile", "bird", "cat", "deer", "dog", "frog", "horse", "ship", "truck"};

/// Reads CIFAR-10 binary batches. `path` is either one batch file or a directory whose
/// data_batch_*.bin files are read in name order. Keeps the requested classes (labels
/// remapped to their position in `classes`), at most max_per_class images each, with
/// pixels scaled to [0, 1] in the file's channel-planar order.
Dataset load_cifar10(const std::filesystem::path& path, std::span<const std::string> classes,
                     std::size_t max_per_class);

std::size_t cifar_class_index(std::string_view name);

}  // namespace renn
