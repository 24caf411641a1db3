#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "renn/cifar10.hpp"
#include "renn/errors.hpp"
#include "support.hpp"

using namespace renn;

namespace {

void write_batch(const std::filesystem::path& path, const std::vector<unsigned char>& labels, std::size_t truncate = 0) {
    std::string bytes;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        bytes.push_back(static_cast<char>(labels[r]));
        for (std::size_t p = 0; p < kCifarImageBytes; ++p) bytes.push_back(static_cast<char>((r * 7 + p) % 256));
    }
    bytes.resize(bytes.size() - truncate);
    std::ofstream(path, std::ios::binary) << bytes;
}

}  // namespace

TEST_CASE("class names") {
    CHECK(cifar_class_index("airplane") == 0);
    CHECK(cifar_class_index("truck") == 9);
    CHECK_THROWS_AS(cifar_class_index("lorry"), ConfigError);
}

TEST_CASE("load filters, remaps and caps classes") {
    test::TempDir dir("cifar");
    write_batch(dir / "data_batch_1.bin", {3, 8, 3, 0, 8, 3});
    write_batch(dir / "data_batch_2.bin", {8, 8});
    write_batch(dir / "test_batch.bin", {3, 3, 3});
    const std::vector<std::string> classes{"ship", "cat"};
    const Dataset ds = load_cifar10(dir.path(), classes, 3);
    CHECK(ds.num_classes == 2);
    CHECK(ds.feature_dim == kCifarImageBytes);
    CHECK(ds.class_names == classes);
    CHECK(ds.size() == 6);
    std::size_t ship = 0, cat = 0;
    for (const auto& s : ds.samples) (*s.label == 0 ? ship : cat)++;
    CHECK(ship == 3);
    CHECK(cat == 3);
    // First kept record is record 0 of batch 1 (a cat).
    CHECK(*ds.samples[0].label == 1);
    CHECK(ds.samples[0].features[0] == 0.0);
    CHECK(ds.samples[0].features[255] == doctest::Approx(1.0));
    CHECK(ds.samples[1].features[1] == doctest::Approx(8.0 / 255.0));

    const Dataset single = load_cifar10(dir / "data_batch_2.bin", classes, 10);
    CHECK(single.size() == 2);
}

TEST_CASE("malformed batches report the byte offset") {
    test::TempDir dir("cifar_bad");
    write_batch(dir / "data_batch_1.bin", {1, 2}, 10);
    const std::vector<std::string> classes{"bird"};
    try {
        load_cifar10(dir / "data_batch_1.bin", classes, 5);
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("3073") != std::string::npos);
    }
    write_batch(dir / "data_batch_2.bin", {1, 12});
    CHECK_THROWS_AS(load_cifar10(dir / "data_batch_2.bin", classes, 5), FormatError);
    CHECK_THROWS(load_cifar10(dir / "nowhere", classes, 5));
    const std::vector<std::string> twice{"bird", "bird"};
    CHECK_THROWS_AS(load_cifar10(dir / "data_batch_2.bin", twice, 5), ConfigError);
}
