#include "renn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "renn/errors.hpp"
#include "renn/random.hpp"

namespace renn {

std::string_view to_string(Partition p) {
    switch (p) {
        case Partition::In: return "IN";
        case Partition::Ood: return "OOD";
        case Partition::Bod: return "BOD";
    }
    return "IN";
}

Partition parse_partition(std::string_view text) {
    if (text == "IN") return Partition::In;
    if (text == "OOD") return Partition::Ood;
    if (text == "BOD") return Partition::Bod;
    throw FormatError("unknown partition tag '" + std::string(text) + "'");
}

std::size_t Dataset::count(Partition p) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [p](const Sample& s) { return s.partition == p; }));
}

std::vector<std::size_t> Dataset::indices_of(Partition p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].partition == p) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> Dataset::labeled_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].partition != Partition::Ood) {
            out.push_back(i);
        }
    }
    return out;
}

void Dataset::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (s.features.size() != feature_dim) {
            throw DomainError("sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) +
                              " features, expected " + std::to_string(feature_dim));
        }
        if (s.partition == Partition::Ood && s.label) {
            throw DomainError("OOD sample " + std::to_string(i) + " carries a label");
        }
        if (s.partition != Partition::Ood) {
            if (!s.label) {
                throw DomainError("sample " + std::to_string(i) + " is unlabeled but not OOD");
            }
            if (*s.label >= num_classes) {
                throw DomainError("sample " + std::to_string(i) + " label out of range");
            }
        }
    }
}

Dataset partition(const Dataset& dataset, std::span<const std::size_t> ood, std::span<const std::size_t> bod) {
    std::vector<int> tag(dataset.size(), 0);
    auto mark = [&](std::span<const std::size_t> ids, int value) {
        for (std::size_t id : ids) {
            if (id >= dataset.size()) {
                throw DomainError("partition index " + std::to_string(id) + " out of range");
            }
            if (tag[id] != 0) {
                throw DomainError("partition index " + std::to_string(id) + " assigned twice");
            }
            tag[id] = value;
        }
    };
    mark(ood, 1);
    mark(bod, 2);

    Dataset out = dataset;
    for (std::size_t i = 0; i < out.size(); ++i) {
        Sample& s = out.samples[i];
        if (tag[i] == 1) {
            s.partition = Partition::Ood;
            s.label.reset();
            continue;
        }
        if (!s.label) {
            throw DomainError("unlabeled sample " + std::to_string(i) + " cannot be tagged IN or BOD");
        }
        s.partition = tag[i] == 2 ? Partition::Bod : Partition::In;
    }
    return out;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& dataset, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw DomainError("holdout fraction must lie in [0, 1]");
    }
    // Group by label (OOD pool last) so every class is split in the same proportion.
    std::vector<std::vector<std::size_t>> groups(dataset.num_classes + 1);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Sample& s = dataset.samples[i];
        groups[s.label ? *s.label : dataset.num_classes].push_back(i);
    }
    std::vector<bool> held(dataset.size(), false);
    const CounterRng rng(seed, 0x5e11);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& ids = groups[g];
        shuffle_indices(ids, rng, g << 32);
        const auto n_held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size())));
        for (std::size_t j = 0; j < n_held; ++j) {
            held[ids[j]] = true;
        }
    }
    Dataset train = dataset;
    Dataset holdout = dataset;
    train.samples.clear();
    holdout.samples.clear();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (held[i] ? holdout : train).samples.push_back(dataset.samples[i]);
    }
    return {std::move(train), std::move(holdout)};
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
    out << "id,partition,label";
    for (std::size_t f = 0; f < dataset.feature_dim; ++f) {
        out << ",f" << f;
    }
    out << '\n';
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Sample& s = dataset.samples[i];
        out << i << ',' << to_string(s.partition) << ',';
        if (s.label) {
            out << *s.label;
        }
        for (double v : s.features) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::ostringstream buf;
    write_dataset_csv(buf, dataset);
    write_file_atomically(path, buf.str());
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* what) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, std::optional<std::size_t> num_classes) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("dataset CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_fields(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "partition" || header[2] != "label") {
        throw FormatError("dataset CSV header must start with id,partition,label,f0");
    }
    Dataset ds;
    ds.feature_dim = header.size() - 3;
    for (std::size_t f = 0; f < ds.feature_dim; ++f) {
        if (header[3 + f] != "f" + std::to_string(f)) {
            throw FormatError("dataset CSV header column " + std::to_string(3 + f) + " should be f" + std::to_string(f));
        }
    }
    std::size_t line_no = 1;
    std::size_t max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        }
        const auto id = parse_number<std::size_t>(fields[0], line_no, "id");
        if (id != ds.samples.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": ids must be 0,1,2,... in order");
        }
        Sample s;
        s.partition = parse_partition(fields[1]);
        if (!fields[2].empty()) {
            s.label = parse_number<std::size_t>(fields[2], line_no, "label");
            max_label = std::max(max_label, *s.label);
        }
        s.features.reserve(ds.feature_dim);
        for (std::size_t f = 0; f < ds.feature_dim; ++f) {
            s.features.push_back(parse_number<double>(fields[3 + f], line_no, "feature"));
        }
        ds.samples.push_back(std::move(s));
    }
    ds.num_classes = num_classes.value_or(std::max<std::size_t>(2, max_label + 1));
    try {
        ds.validate();
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
    return ds;
}

Dataset read_dataset_csv(const std::filesystem::path& path, std::optional<std::size_t> num_classes) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    }
    return read_dataset_csv(in, num_classes);
}

void write_index_file(const std::filesystem::path& path, std::span<const std::size_t> ids) {
    std::vector<std::size_t> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (std::size_t id : sorted) {
        out += std::to_string(id);
        out += '\n';
    }
    write_file_atomically(path, out);
}

std::vector<std::size_t> read_index_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open index file '" + path.string() + "'");
    }
    std::vector<std::size_t> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        ids.push_back(parse_number<std::size_t>(line, line_no, "id"));
    }
    if (!std::is_sorted(ids.begin(), ids.end()) || std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw FormatError("index file '" + path.string() + "' must list distinct ids in ascending order");
    }
    return ids;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

}  // namespace renn
