#include "renn/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "renn/errors.hpp"
#include "renn/random.hpp"

namespace renn {

namespace {

Sample draw(const CounterRng& rng, std::uint64_t index, const std::array<double, 2>& mean) {
    Sample s;
    s.features = {mean[0] + rng.normal(2 * index), mean[1] + rng.normal(2 * index + 1)};
    return s;
}

void append_ood(Dataset& ds, const CounterRng& rng, std::uint64_t first_index, std::size_t n_per_ood) {
    std::uint64_t index = first_index;
    for (const auto& centre : kSyntheticOodMeans) {
        for (std::size_t m = 0; m < n_per_ood; ++m) {
            Sample s = draw(rng, index++, centre);
            s.partition = Partition::Ood;
            ds.samples.push_back(std::move(s));
        }
    }
}

}  // namespace

Dataset gen_synthetic(std::uint64_t seed, std::size_t n_per_class, std::size_t n_per_ood) {
    if (n_per_class == 0 || n_per_ood == 0) {
        throw DomainError("sample counts must be positive");
    }
    Dataset ds;
    ds.num_classes = kSyntheticClassMeans.size();
    ds.feature_dim = 2;
    ds.seed = seed;
    ds.samples.reserve(kSyntheticClassMeans.size() * n_per_class + kSyntheticOodMeans.size() * n_per_ood);
    const CounterRng rng(seed);
    std::uint64_t index = 0;
    for (std::size_t c = 0; c < kSyntheticClassMeans.size(); ++c) {
        for (std::size_t m = 0; m < n_per_class; ++m) {
            Sample s = draw(rng, index++, kSyntheticClassMeans[c]);
            s.label = c;
            ds.samples.push_back(std::move(s));
        }
    }
    append_ood(ds, rng, index, n_per_ood);
    return ds;
}

Dataset gen_synthetic_ood(std::uint64_t seed, std::size_t n_per_ood) {
    if (n_per_ood == 0) {
        throw DomainError("sample counts must be positive");
    }
    Dataset ds;
    ds.num_classes = kSyntheticClassMeans.size();
    ds.feature_dim = 2;
    ds.seed = seed;
    append_ood(ds, CounterRng(seed, 1), 0, n_per_ood);
    return ds;
}

std::array<double, 3> synthetic_posterior(double x, double y) {
    std::array<double, 3> logp{};
    for (std::size_t c = 0; c < 3; ++c) {
        const double dx = x - kSyntheticClassMeans[c][0];
        const double dy = y - kSyntheticClassMeans[c][1];
        logp[c] = -0.5 * (dx * dx + dy * dy);
    }
    const double peak = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double& v : logp) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : logp) {
        v /= total;
    }
    return logp;
}

bool in_boundary_band(double x, double y, double margin) {
    auto post = synthetic_posterior(x, y);
    std::sort(post.begin(), post.end(), std::greater<>());
    return post[0] - post[1] < margin;
}

}  // namespace renn
