#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "renn/partition.hpp"

namespace renn {

struct Sample {
    std::vector<double> features;
    std::optional<std::size_t> label;  // absent exactly for OOD samples
    Partition partition = Partition::In;
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t num_classes = 0;
    std::size_t feature_dim = 0;
    std::uint64_t seed = 0;
    /// Optional human-readable class names, index = dense label.
    std::vector<std::string> class_names;

    std::size_t size() const { return samples.size(); }
    std::size_t count(Partition p) const;
    std::vector<std::size_t> indices_of(Partition p) const;
    /// IN and BOD samples.
    std::vector<std::size_t> labeled_indices() const;

    /// Feature dimensions, label ranges and the OOD-has-no-label rule. Throws DomainError.
    void validate() const;
};

/// Retags samples: `ood` become OOD (labels stripped), `bod` become BOD, the rest IN.
/// Overlapping or out-of-range indices, or an unlabeled sample landing in IN/BOD, are DomainErrors.
Dataset partition(const Dataset& dataset, std::span<const std::size_t> ood, std::span<const std::size_t> bod);

/// Deterministic split: a seeded shuffle of each class (and of the OOD pool) sends
/// round(fraction * count) samples to the held-out part. Returns {train, holdout}.
std::pair<Dataset, Dataset> split_holdout(const Dataset& dataset, double fraction, std::uint64_t seed);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

// CSV: header `id,partition,label,f0,f1,...`; ids are the row index; label is empty for OOD.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
/// num_classes defaults to max label + 1 (at least 2).
Dataset read_dataset_csv(std::istream& in, std::optional<std::size_t> num_classes = std::nullopt);
Dataset read_dataset_csv(const std::filesystem::path& path, std::optional<std::size_t> num_classes = std::nullopt);

// Index files: one id per line, ascending.
void write_index_file(const std::filesystem::path& path, std::span<const std::size_t> ids);
std::vector<std::size_t> read_index_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace renn
