#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "renn/checkpoint.hpp"
#include "renn/errors.hpp"
#include "renn/loss.hpp"
#include "renn/network.hpp"
#include "renn/optimizer.hpp"
#include "support.hpp"

using namespace renn;

namespace {

const std::vector<std::size_t> kDims{2, 8, 3};

double& param_at(ModelParams& m, std::size_t layer, bool bias, Eigen::Index r, Eigen::Index c) {
    return bias ? m.biases[layer](r) : m.weights[layer](r, c);
}

// Composite objective: network evidence -> alpha -> regularized loss.
struct Composite {
    Eigen::MatrixXd inputs;
    std::vector<std::optional<std::size_t>> labels;
    std::vector<Partition> parts;
    LossConfig cfg;

    std::vector<LossSample> samples(const Eigen::MatrixXd& evidence) const {
        std::vector<LossSample> out;
        for (Eigen::Index c = 0; c < evidence.cols(); ++c) {
            Vector a(static_cast<std::size_t>(evidence.rows()));
            for (Eigen::Index j = 0; j < evidence.rows(); ++j) a[static_cast<std::size_t>(j)] = evidence(j, c) + 1.0;
            out.push_back({DirichletParams::from_alpha(a), labels[static_cast<std::size_t>(c)], parts[static_cast<std::size_t>(c)],
                           std::nullopt});
        }
        return out;
    }
    double value(const ModelParams& m) const { return total_loss(samples(forward(m, inputs)), cfg, 0.7).total; }
};

bool near_kink(const ForwardCache& cache) {
    for (const auto& z : cache.pre_activations)
        if ((z.array().abs() < 1e-3).any()) return true;
    return false;
}

}  // namespace

TEST_CASE("init shapes and determinism") {
    const ModelParams a = init_model(kDims, Head::Evidence, 42);
    const ModelParams b = init_model(kDims, Head::Evidence, 42);
    const ModelParams c = init_model(kDims, Head::Evidence, 43);
    CHECK_NOTHROW(a.validate());
    CHECK(a.parameter_count() == 2 * 8 + 8 + 8 * 3 + 3);
    CHECK(a.weights[0].rows() == 8);
    CHECK(a.weights[0].cols() == 2);
    CHECK(a.weights[1] == b.weights[1]);
    CHECK(a.weights[1] != c.weights[1]);
    CHECK(a.biases[0].isZero());
    const std::vector<std::size_t> bad{2, 0, 3};
    CHECK_THROWS_AS(init_model(bad, Head::Evidence, 1), DomainError);
}

TEST_CASE("init scale follows fan-in") {
    const std::vector<std::size_t> dims{400, 400, 3};
    const ModelParams m = init_model(dims, Head::Evidence, 5);
    const double var = m.weights[0].array().square().mean();
    CHECK(var == doctest::Approx(2.0 / 400.0).epsilon(0.02));
}

TEST_CASE("forward pass on hand-set weights") {
    ModelParams m = init_model(kDims, Head::Evidence, 1);
    m.weights[0].setZero();
    m.weights[0](0, 0) = 1.0;
    m.weights[0](1, 1) = -1.0;
    m.biases[0].setConstant(0.5);
    m.weights[1].setZero();
    m.weights[1](0, 0) = 2.0;
    m.weights[1](1, 1) = 1.0;
    m.biases[1] << 0.0, 0.0, -1.0;
    const std::vector<double> x{1.0, 3.0};
    // hidden = relu([1.5, -2.5, 0.5 ...]); out = relu([3, 0, -1])
    const auto e = forward(m, x);
    CHECK(e[0] == doctest::Approx(3.0));
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 0.0);

    m.evidence_activation = EvidenceActivation::Softplus;
    const auto s = forward(m, x);
    CHECK(s[0] == doctest::Approx(std::log1p(std::exp(3.0))));
    CHECK(s[2] == doctest::Approx(std::log1p(std::exp(-1.0))));

    m.head = Head::Softmax;
    const auto p = forward(m, x);
    const double z = std::exp(3.0) + 1.0 + std::exp(-1.0);
    CHECK(p[0] == doctest::Approx(std::exp(3.0) / z));
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));

    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(forward(m, wrong), DomainError);
}

TEST_CASE("composite loss gradient through a [2,8,3] network") {
    std::mt19937_64 gen(101);
    std::normal_distribution<double> nd(0.0, 1.5);
    int cases = 0;
    double worst = 0.0, worst_diss = 0.0;
    for (std::uint64_t seed = 0; cases < 100; ++seed) {
        const bool with_diss = seed % 2 == 1;
        ModelParams m = init_model(kDims, Head::Evidence, seed,
                                   seed % 4 < 2 ? EvidenceActivation::Softplus : EvidenceActivation::Relu);
        Composite obj;
        obj.inputs.resize(2, 6);
        for (Eigen::Index i = 0; i < obj.inputs.size(); ++i) obj.inputs(i) = nd(gen);
        obj.parts = {Partition::In, Partition::In, Partition::Bod, Partition::Ood, Partition::In, Partition::Ood};
        obj.labels = {0, 1, 2, std::nullopt, 1, std::nullopt};
        obj.cfg = LossConfig{0.5, with_diss ? 0.5 : 0.0};

        ForwardCache cache;
        const Eigen::MatrixXd ev = forward(m, obj.inputs, &cache);
        if (near_kink(cache)) continue;
        auto samples = obj.samples(ev);
        if (with_diss) {
            bool tie = false;
            for (const auto& s : samples)
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = i + 1; j < 3; ++j)
                        if (std::abs(s.alpha.alpha(i) - s.alpha.alpha(j)) < 1e-4) tie = true;
            if (tie) continue;
        }
        const LossResult res = total_loss_with_grad(samples, obj.cfg, 0.7);
        Eigen::MatrixXd g_out(3, 6);
        for (Eigen::Index c = 0; c < 6; ++c)
            for (Eigen::Index j = 0; j < 3; ++j) g_out(j, c) = res.grad_alpha[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
        const Gradients grads = backward(m, cache, g_out);

        for (std::size_t layer = 0; layer < m.num_layers(); ++layer) {
            for (bool bias : {false, true}) {
                const Eigen::Index rows = m.weights[layer].rows();
                const Eigen::Index cols = bias ? 1 : m.weights[layer].cols();
                for (Eigen::Index r = 0; r < rows; ++r) {
                    for (Eigen::Index c = 0; c < cols; ++c) {
                        double& p = param_at(m, layer, bias, r, c);
                        const double p0 = p;
                        const double h = 1e-5;
                        p = p0 + h;
                        const double up = obj.value(m);
                        p = p0 - h;
                        const double down = obj.value(m);
                        p = p0;
                        const double fd = (up - down) / (2.0 * h);
                        const double an = bias ? grads.biases[layer](r) : grads.weights[layer](r, c);
                        if (std::abs(an) < 1e-10 && std::abs(fd) < 1e-10) continue;
                        double& worst_ref = with_diss ? worst_diss : worst;
                        worst_ref = std::max(worst_ref, test::rel_err(an, fd));
                    }
                }
            }
        }
        ++cases;
    }
    CHECK(worst < 1e-4);
    CHECK(worst_diss < 1e-3);
}

TEST_CASE("softmax head cross-entropy gradient") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ModelParams m = init_model(kDims, Head::Softmax, seed);
        Eigen::MatrixXd x(2, 1);
        x << nd(gen), nd(gen);
        const auto y = one_hot(3, seed % 3);
        ForwardCache cache;
        const Eigen::MatrixXd p = forward(m, x, &cache);
        if (near_kink(cache)) continue;
        const std::vector<double> probs(p.data(), p.data() + 3);
        const auto ce = cross_entropy_l2(probs, y, m, 0.005);
        Eigen::MatrixXd g(3, 1);
        for (int j = 0; j < 3; ++j) g(j, 0) = ce.grad_logits[static_cast<std::size_t>(j)];
        Gradients grads = backward(m, cache, g);
        add_weight_decay(grads, m, 0.005);
        auto loss = [&](const ModelParams& mm) {
            const Eigen::MatrixXd q = forward(mm, x);
            const std::vector<double> qq(q.data(), q.data() + 3);
            return cross_entropy_l2(qq, y, mm, 0.005).loss;
        };
        for (Eigen::Index r = 0; r < 8; ++r) {
            const double h = 1e-5;
            const double w0 = m.weights[0](r, 1);
            m.weights[0](r, 1) = w0 + h;
            const double up = loss(m);
            m.weights[0](r, 1) = w0 - h;
            const double down = loss(m);
            m.weights[0](r, 1) = w0;
            worst = std::max(worst, test::rel_err(grads.weights[0](r, 1), (up - down) / (2 * h)));
        }
        CHECK(ce.loss == doctest::Approx(-std::log(probs[seed % 3]) + weight_penalty(m, 0.005)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("stale cache is rejected") {
    ModelParams m = init_model(kDims, Head::Evidence, 3);
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 4);
    ForwardCache cache;
    forward(m, x, &cache);
    Gradients g = Gradients::zeros_like(m);
    AdamState st = AdamState::for_model(m, 0.01);
    adam_step(m, g, st);
    CHECK_THROWS_AS(backward(m, cache, Eigen::MatrixXd::Zero(3, 4)), InternalError);
    forward(m, x, &cache);
    CHECK_THROWS_AS(backward(m, cache, Eigen::MatrixXd::Zero(3, 5)), InternalError);
}

TEST_CASE("adam step matches the bias-corrected update") {
    ModelParams m = init_model(kDims, Head::Evidence, 9);
    const ModelParams before = m;
    Gradients g = Gradients::zeros_like(m);
    g.weights[1](0, 0) = 0.3;
    g.biases[0](2) = -2.0;
    AdamState st = AdamState::for_model(m, 0.01);
    adam_step(m, g, st);
    // First step: m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
    CHECK(m.weights[1](0, 0) == doctest::Approx(before.weights[1](0, 0) - 0.01 * 0.3 / (0.3 + 1e-8)));
    CHECK(m.biases[0](2) == doctest::Approx(before.biases[0](2) + 0.01));
    CHECK(m.weights[0] == before.weights[0]);
    CHECK(st.step_count == 1);

    adam_step(m, g, st);
    const double m2 = 0.9 * 0.1 * 0.3 + 0.1 * 0.3;
    const double v2 = 0.999 * 0.001 * 0.09 + 0.001 * 0.09;
    const double mhat = m2 / (1 - 0.81), vhat = v2 / (1 - 0.999 * 0.999);
    CHECK(m.weights[1](0, 0) ==
          doctest::Approx(before.weights[1](0, 0) - 0.01 * 0.3 / (0.3 + 1e-8) - 0.01 * mhat / (std::sqrt(vhat) + 1e-8)));
}

TEST_CASE("non-finite gradients abort without touching parameters") {
    ModelParams m = init_model(kDims, Head::Evidence, 9);
    const ModelParams before = m;
    Gradients g = Gradients::zeros_like(m);
    g.weights[0](1, 1) = 1.0;
    g.biases[1](0) = std::numeric_limits<double>::quiet_NaN();
    AdamState st = AdamState::for_model(m, 0.01);
    CHECK_FALSE(g.all_finite());
    CHECK_THROWS_AS(adam_step(m, g, st), TrainingError);
    CHECK(m.weights[0] == before.weights[0]);
    CHECK(st.step_count == 0);
}

TEST_CASE("dropout masks hidden units deterministically") {
    const ModelParams m = init_model(kDims, Head::Evidence, 2);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 50);
    DropoutSpec d{0.5, 4, 1};
    ForwardCache c1, c2;
    const Eigen::MatrixXd a = forward(m, x, &c1, &d);
    const Eigen::MatrixXd b = forward(m, x, &c2, &d);
    CHECK(a == b);
    const auto& scale = c1.dropout_scale[0];
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
        CHECK((scale(i) == 0.0 || scale(i) == doctest::Approx(2.0)));
    }
    const double kept = (scale.array() > 0).cast<double>().mean();
    CHECK(kept == doctest::Approx(0.5).epsilon(0.2));
    DropoutSpec off{1.0, 4, 1};
    CHECK(forward(m, x, nullptr, &off) == forward(m, x));
    DropoutSpec bad{0.0, 4, 1};
    CHECK_THROWS_AS(forward(m, x, nullptr, &bad), DomainError);
}

TEST_CASE("checkpoint round trip is exact") {
    ModelParams m = init_model(kDims, Head::Softmax, 77, EvidenceActivation::Softplus);
    m.biases[1](2) = 0.1 + 0.2;
    Checkpoint ck{m, nlohmann::json{{"variant", "l2"}}};
    const Checkpoint back = parse_checkpoint(serialize_checkpoint(ck));
    CHECK(back.model.layer_dims == m.layer_dims);
    CHECK(back.model.head == Head::Softmax);
    CHECK(back.model.evidence_activation == EvidenceActivation::Softplus);
    CHECK(back.model.seed == 77);
    for (std::size_t i = 0; i < m.num_layers(); ++i) {
        CHECK(back.model.weights[i] == m.weights[i]);
        CHECK(back.model.biases[i] == m.biases[i]);
    }
    CHECK(back.config["variant"] == "l2");

    test::TempDir dir("ckpt");
    save_checkpoint(dir / "m.json", ck);
    CHECK(load_checkpoint(dir / "m.json").model.weights[0] == m.weights[0]);
    CHECK_FALSE(std::filesystem::exists(dir / "m.json.tmp"));
}

TEST_CASE("malformed checkpoints are format errors") {
    CHECK_THROWS_AS(parse_checkpoint("{"), FormatError);
    CHECK_THROWS_AS(parse_checkpoint("{\"format\": \"other\"}"), FormatError);
    const ModelParams m = init_model(kDims, Head::Evidence, 1);
    auto doc = nlohmann::json::parse(serialize_checkpoint({m, nullptr}));
    doc["weights"][0].erase(0);
    CHECK_THROWS_AS(parse_checkpoint(doc.dump()), FormatError);
}
