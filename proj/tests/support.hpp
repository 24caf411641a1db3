#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace renn::test {

inline double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) / (std::max(std::abs(analytic), std::abs(numeric)) + 1e-8);
}

inline double central_diff(const std::function<double(std::vector<double>)>& f, std::vector<double> x, std::size_t i,
                           double h = 1e-5) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

inline std::vector<double> random_alpha(std::mt19937_64& gen, std::size_t k, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> a(k);
    for (auto& v : a) v = u(gen);
    return a;
}

// Independent oracles written straight from the definitions.

inline double oracle_vacuity(std::span<const double> alpha) {
    double s = 0.0;
    for (double a : alpha) s += a;
    return static_cast<double>(alpha.size()) / s;
}

inline double oracle_dissonance(std::span<const double> alpha) {
    const std::size_t k = alpha.size();
    double s = 0.0;
    for (double a : alpha) s += a;
    std::vector<double> b(k);
    for (std::size_t i = 0; i < k; ++i) b[i] = (alpha[i] - 1.0) / s;
    double d = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double bal = (b[i] + b[j] == 0.0) ? 1.0 : 1.0 - std::abs(b[j] - b[i]) / (b[j] + b[i]);
            num += b[j] * bal;
            den += b[j];
        }
        if (den > 0.0) d += b[i] * num / den;
    }
    return d;
}

inline std::vector<double> sample_dirichlet(std::mt19937_64& gen, std::span<const double> alpha) {
    std::vector<double> p(alpha.size());
    double total = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        std::gamma_distribution<double> g(alpha[j], 1.0);
        do {
            p[j] = g(gen);
        } while (p[j] <= 0.0);
        total += p[j];
    }
    for (auto& v : p) v /= total;
    return p;
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanEstimate estimate_mean(const std::vector<double>& draws) {
    double m = 0.0;
    for (double d : draws) m += d;
    m /= static_cast<double>(draws.size());
    double v = 0.0;
    for (double d : draws) v += (d - m) * (d - m);
    v /= static_cast<double>(draws.size() - 1);
    return {m, std::sqrt(v / static_cast<double>(draws.size()))};
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("renn_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace renn::test
