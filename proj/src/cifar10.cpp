#include "renn/cifar10.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <vector>

#include "renn/errors.hpp"

namespace renn {

std::size_t cifar_class_index(std::string_view name) {
    const auto it = std::find(kCifarClassNames.begin(), kCifarClassNames.end(), name);
    if (it == kCifarClassNames.end()) {
        throw ConfigError("unknown CIFAR-10 class '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - kCifarClassNames.begin());
}

namespace {

std::vector<std::filesystem::path> batch_files(const std::filesystem::path& path) {
    if (!std::filesystem::is_directory(path)) {
        if (!std::filesystem::exists(path)) {
            throw std::runtime_error("CIFAR-10 path '" + path.string() + "' does not exist");
        }
        return {path};
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("data_batch_") && name.ends_with(".bin")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no data_batch_*.bin files under '" + path.string() + "'");
    }
    return files;
}

}  // namespace

Dataset load_cifar10(const std::filesystem::path& path, std::span<const std::string> classes,
                     std::size_t max_per_class) {
    if (classes.empty()) {
        throw ConfigError("no CIFAR-10 classes requested");
    }
    // dense label for each of the 10 raw labels, or -1 when the class is not requested
    std::array<int, 10> remap;
    remap.fill(-1);
    Dataset ds;
    ds.feature_dim = kCifarImageBytes;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::size_t raw = cifar_class_index(classes[i]);
        if (remap[raw] != -1) {
            throw ConfigError("CIFAR-10 class '" + classes[i] + "' requested twice");
        }
        remap[raw] = static_cast<int>(i);
        ds.class_names.push_back(classes[i]);
    }
    ds.num_classes = classes.size();

    std::vector<std::size_t> taken(classes.size(), 0);
    for (const auto& file : batch_files(path)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            throw std::runtime_error("cannot open '" + file.string() + "'");
        }
        const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.size() % kCifarRecordBytes != 0) {
            const std::size_t offset = bytes.size() - bytes.size() % kCifarRecordBytes;
            throw FormatError("'" + file.string() + "': truncated record at byte offset " + std::to_string(offset) +
                              " (file size " + std::to_string(bytes.size()) + " is not a multiple of " +
                              std::to_string(kCifarRecordBytes) + ")");
        }
        for (std::size_t offset = 0; offset < bytes.size(); offset += kCifarRecordBytes) {
            const unsigned raw = bytes[offset];
            if (raw >= kCifarClassNames.size()) {
                throw FormatError("'" + file.string() + "': label byte " + std::to_string(raw) + " at byte offset " +
                                  std::to_string(offset));
            }
            const int label = remap[raw];
            if (label < 0 || taken[static_cast<std::size_t>(label)] >= max_per_class) {
                continue;
            }
            Sample s;
            s.label = static_cast<std::size_t>(label);
            s.features.resize(kCifarImageBytes);
            for (std::size_t p = 0; p < kCifarImageBytes; ++p) {
                s.features[p] = static_cast<double>(bytes[offset + 1 + p]) / 255.0;
            }
            ds.samples.push_back(std::move(s));
            ++taken[static_cast<std::size_t>(label)];
        }
    }
    return ds;
}

}  // namespace renn
