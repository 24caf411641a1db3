#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "renn/dataset.hpp"
#include "renn/errors.hpp"
#include "renn/synthetic.hpp"
#include "support.hpp"

using namespace renn;

TEST_CASE("synthetic layout and class means") {
    const Dataset ds = gen_synthetic(0);
    CHECK(ds.size() == 3200);
    CHECK(ds.count(Partition::Ood) == 200);
    CHECK(ds.feature_dim == 2);
    CHECK(ds.num_classes == 3);
    CHECK_NOTHROW(ds.validate());
    for (std::size_t c = 0; c < 3; ++c) {
        double mx = 0, my = 0;
        for (std::size_t i = c * 1000; i < (c + 1) * 1000; ++i) {
            CHECK(*ds.samples[i].label == c);
            mx += ds.samples[i].features[0] / 1000.0;
            my += ds.samples[i].features[1] / 1000.0;
        }
        CHECK(std::abs(mx - kSyntheticClassMeans[c][0]) < 0.15);
        CHECK(std::abs(my - kSyntheticClassMeans[c][1]) < 0.15);
    }
    for (std::size_t o = 0; o < 2; ++o) {
        double mx = 0;
        for (std::size_t i = 3000 + o * 100; i < 3100 + o * 100; ++i) {
            CHECK_FALSE(ds.samples[i].label.has_value());
            mx += ds.samples[i].features[0] / 100.0;
        }
        CHECK(std::abs(mx - kSyntheticOodMeans[o][0]) < 0.5);
    }
}

TEST_CASE("synthetic sample variance is unit") {
    const Dataset ds = gen_synthetic(8, 4000, 1);
    double v = 0.0;
    for (std::size_t i = 0; i < 4000; ++i) v += std::pow(ds.samples[i].features[0] + 2.0, 2) / 4000.0;
    CHECK(v == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("synthetic generation is seeded and prefix-stable") {
    const Dataset a = gen_synthetic(4, 50, 10);
    const Dataset b = gen_synthetic(4, 50, 10);
    const Dataset c = gen_synthetic(5, 50, 10);
    CHECK(a.samples[17].features == b.samples[17].features);
    CHECK(a.samples[17].features != c.samples[17].features);
    const Dataset ood = gen_synthetic_ood(4, 10);
    CHECK(ood.size() == 20);
    CHECK(ood.count(Partition::Ood) == 20);
    CHECK(ood.samples[0].features != a.samples[150].features);
}

TEST_CASE("mixture posterior and boundary band") {
    const auto p = synthetic_posterior(-2, -2);
    CHECK(p[0] > 0.9);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
    CHECK(in_boundary_band(0.0, -2.0));
    CHECK_FALSE(in_boundary_band(-2.0, -2.0));
    CHECK_FALSE(in_boundary_band(2.0, -2.0));
}

TEST_CASE("partition retags and strips OOD labels") {
    const Dataset ds = gen_synthetic(1, 10, 2);
    const std::vector<std::size_t> ood{30, 31, 32, 33};
    const std::vector<std::size_t> bod{0, 5};
    const Dataset p = partition(ds, ood, bod);
    CHECK(p.count(Partition::Ood) == 4);
    CHECK(p.count(Partition::Bod) == 2);
    CHECK(p.count(Partition::In) == 28);
    CHECK(p.labeled_indices().size() == 30);

    const std::vector<std::size_t> labeled_ood{1, 30, 31, 32, 33};
    const Dataset q = partition(ds, labeled_ood, {});
    CHECK_FALSE(q.samples[1].label.has_value());
    CHECK(q.count(Partition::Ood) == 5);

    const std::vector<std::size_t> overlap{0};
    CHECK_THROWS_AS(partition(ds, overlap, overlap), DomainError);
    const std::vector<std::size_t> range{99};
    CHECK_THROWS_AS(partition(ds, range, {}), DomainError);
    // An unlabeled sample cannot become IN.
    CHECK_THROWS_AS(partition(ds, {}, {}), DomainError);
}

TEST_CASE("validate catches inconsistent samples") {
    Dataset ds = gen_synthetic(1, 5, 1);
    ds.samples[0].features.push_back(1.0);
    CHECK_THROWS_AS(ds.validate(), DomainError);
    ds = gen_synthetic(1, 5, 1);
    ds.samples[0].label = 3;
    CHECK_THROWS_AS(ds.validate(), DomainError);
    ds = gen_synthetic(1, 5, 1);
    ds.samples[15].label = 0;
    CHECK_THROWS_AS(ds.validate(), DomainError);
}

TEST_CASE("holdout split is stratified and deterministic") {
    const Dataset ds = gen_synthetic(2, 100, 10);
    const auto [train, hold] = split_holdout(ds, 0.2, 7);
    CHECK(hold.size() == 64);
    CHECK(train.size() == 256);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(std::count_if(hold.samples.begin(), hold.samples.end(), [&](const Sample& s) { return s.label == c; }) == 20);
    }
    const auto again = split_holdout(ds, 0.2, 7);
    CHECK(again.second.samples[3].features == hold.samples[3].features);
    CHECK_THROWS_AS(split_holdout(ds, 1.5, 7), DomainError);
}

TEST_CASE("dataset CSV round trip") {
    Dataset ds = gen_synthetic(3, 20, 5);
    const std::vector<std::size_t> bod{2, 4};
    ds = partition(ds, ds.indices_of(Partition::Ood), bod);
    std::ostringstream out;
    write_dataset_csv(out, ds);
    const std::string text = out.str();
    CHECK(text.rfind("id,partition,label,f0,f1\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 71);
    CHECK(text.find("\n2,BOD,0,") != std::string::npos);
    CHECK(text.find("\n60,OOD,,") != std::string::npos);

    std::istringstream in(text);
    const Dataset back = read_dataset_csv(in);
    CHECK(back.size() == ds.size());
    CHECK(back.num_classes == 3);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.samples[i].features == ds.samples[i].features);
        CHECK(back.samples[i].label == ds.samples[i].label);
        CHECK(back.samples[i].partition == ds.samples[i].partition);
    }
}

TEST_CASE("malformed dataset CSV") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_dataset_csv(in);
    };
    CHECK_THROWS_AS(parse(""), FormatError);
    CHECK_THROWS_AS(parse("id,label,partition,f0\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n0,IN,0,1.0,2.0\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n1,IN,0,1.0\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n0,XX,0,1.0\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n0,IN,0,abc\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n0,OOD,1,1.0\n"), FormatError);
    CHECK_THROWS_AS(parse("id,partition,label,f0\n0,IN,,1.0\n"), FormatError);
    CHECK(parse("id,partition,label,f0\n0,IN,0,1.5\n1,IN,1,2.5\n").num_classes == 2);
}

TEST_CASE("index files and atomic writes") {
    test::TempDir dir("idx");
    const std::vector<std::size_t> ids{9, 2, 5};
    write_index_file(dir / "ids.txt", ids);
    CHECK(read_index_file(dir / "ids.txt") == std::vector<std::size_t>{2, 5, 9});
    write_file_atomically(dir / "bad.txt", "3\n1\n");
    CHECK_THROWS_AS(read_index_file(dir / "bad.txt"), FormatError);
    CHECK_FALSE(std::filesystem::exists(dir / "bad.txt.tmp"));
    CHECK_THROWS(read_index_file(dir / "missing.txt"));
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, -2.5e-300, 1.0 / 3.0, 123456789.125}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}
