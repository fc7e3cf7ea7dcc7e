#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "glimpse/gradcheck.hpp"
#include "glimpse/net.hpp"
#include "glimpse/optim.hpp"

using namespace glimpse;

TEST_CASE("dense forward: 1x1 layer with weight 2, bias 1 maps [3] to [7]") {
    Sequential<double> net(DataShape::vec(1), {LayerSpec::dense(1)});
    net.params()[0][0] = 2.0;  // weight
    net.params()[1][0] = 1.0;  // bias
    Sequential<double>::Cache cache;
    net.forward({3.0}, cache);
    REQUIRE(cache.out.size() == 1);
    CHECK(cache.out[0] == doctest::Approx(7.0));
}

TEST_CASE("conv forward: one-hot center kernel reproduces the input region") {
    // 1-channel 5x5 input, 3x3 kernel with a 1 at its center, stride 1:
    // the 3x3 valid output equals the input's interior.
    Sequential<double> net(DataShape::volume(1, 5, 5), {LayerSpec::conv(1, 3, 1)});
    auto& w = net.params()[0];
    w.fill(0.0);
    w[4] = 1.0;  // center of the 3x3 kernel
    net.params()[1].fill(0.0);

    std::vector<double> x(25);
    for (int i = 0; i < 25; ++i) x[i] = i * 0.5;
    Sequential<double>::Cache cache;
    net.forward(x, cache);
    REQUIRE(cache.out.size() == 9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(cache.out[r * 3 + c] ==
                  doctest::Approx(x[(r + 1) * 5 + (c + 1)]));
}

TEST_CASE("relu forward: [-1, 0, 2] -> [0, 0, 2]") {
    Sequential<double> net(DataShape::vec(3), {LayerSpec::relu()});
    Sequential<double>::Cache cache;
    net.forward({-1.0, 0.0, 2.0}, cache);
    CHECK(cache.out == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("forward: shape mismatch raises a shape error") {
    Sequential<double> net(DataShape::vec(3), {LayerSpec::dense(2)});
    Sequential<double>::Cache cache;
    CHECK_THROWS_AS(net.forward({1.0, 2.0}, cache), ShapeError);
    CHECK_THROWS_AS((Sequential<double>(DataShape::volume(1, 2, 2),
                                        {LayerSpec::conv(1, 3, 1)})),
                    ShapeError);  // kernel larger than input
}

TEST_CASE("backward: dense bias gradient with all-ones upstream is all ones") {
    Sequential<double> net(DataShape::vec(4), {LayerSpec::dense(3)});
    net.init(1);
    Sequential<double>::Cache cache;
    net.forward({0.3, -0.2, 0.8, 0.1}, cache);
    auto grads = zeros_like(net.params());
    std::vector<double> dx;
    net.backward({1.0, 1.0, 1.0}, cache, grads, dx);
    for (int i = 0; i < 3; ++i) CHECK(grads[1][i] == doctest::Approx(1.0));
}

TEST_CASE("backward: relu gates the gradient at negative pre-activations") {
    Sequential<double> net(DataShape::vec(3), {LayerSpec::relu()});
    Sequential<double>::Cache cache;
    net.forward({-1.0, 0.5, 2.0}, cache);
    auto grads = zeros_like(net.params());
    std::vector<double> dx;
    net.backward({1.0, 1.0, 1.0}, cache, grads, dx);
    CHECK(dx == std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("grad check: dense-only chain is accurate to 1e-6") {
    CHECK(grad_check(DataShape::vec(6), {LayerSpec::dense(4)}, 1) <= 1e-6);
}

TEST_CASE("grad check: conv+relu+dense chain is accurate to 1e-4") {
    const double err = grad_check(DataShape::volume(2, 7, 7),
                                  {LayerSpec::conv(3, 3, 2), LayerSpec::relu(),
                                   LayerSpec::flatten(), LayerSpec::dense(4)},
                                  1);
    CHECK(err <= 1e-4);
}

TEST_CASE("grad check: same seed twice gives the identical error value") {
    const auto chain = std::vector<LayerSpec>{
        LayerSpec::conv(2, 3, 1), LayerSpec::relu(), LayerSpec::flatten(),
        LayerSpec::dense(3)};
    const double a = grad_check(DataShape::volume(1, 6, 6), chain, 9);
    const double b = grad_check(DataShape::volume(1, 6, 6), chain, 9);
    CHECK(a == b);
}

TEST_CASE("grad check: full suite over 10 seeds stays within 1e-4") {
    CHECK(grad_check_suite(1, 10) <= 1e-4);
}

TEST_CASE("conv is linear in its input before any relu") {
    Sequential<double> net(DataShape::volume(2, 6, 6), {LayerSpec::conv(3, 3, 2)});
    net.init(5);
    Rng rng(6);
    std::vector<double> x(72);
    for (auto& v : x) v = rand_range(rng, -1.0, 1.0);
    std::vector<double> x3 = x;
    for (auto& v : x3) v *= 3.0;

    Sequential<double>::Cache c1, c3;
    net.forward(x, c1);
    net.forward(x3, c3);
    // subtract the bias contribution to isolate the linear part
    const auto& b = net.params()[1];
    const int patch = 4;  // 2x2 output per channel
    for (std::size_t i = 0; i < c1.out.size(); ++i) {
        const double bias = b[i / patch];
        CHECK(c3.out[i] - bias == doctest::Approx(3.0 * (c1.out[i] - bias)));
    }
}

TEST_CASE("forward determinism and seeded init reproducibility") {
    Sequential<float> a(DataShape::volume(1, 8, 8),
                        {LayerSpec::conv(2, 3, 2), LayerSpec::relu(),
                         LayerSpec::flatten(), LayerSpec::dense(5)});
    Sequential<float> b = a;
    a.init(42);
    b.init(42);
    for (std::size_t p = 0; p < a.params().size(); ++p)
        CHECK(a.params()[p].data == b.params()[p].data);

    std::vector<float> x(64);
    Rng rng(3);
    for (auto& v : x) v = static_cast<float>(rand_unit(rng));
    Sequential<float>::Cache c1, c2;
    a.forward(x, c1);
    a.forward(x, c2);
    CHECK(c1.out == c2.out);
}

TEST_CASE("huber loss: zero error gives zero loss and zero gradient") {
    std::vector<double> p{1.0, -2.0, 0.5}, g;
    CHECK(huber_loss(p, p, g) == 0.0);
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("huber loss: single element in the linear region, e = 2") {
    std::vector<double> g;
    const double loss = huber_loss<double>({2.0}, {0.0}, g);
    CHECK(loss == doctest::Approx(1.5));  // delta * (|e| - delta/2)
    CHECK(g[0] == doctest::Approx(1.0));  // sign(e) * delta
}

TEST_CASE("huber loss: single element in the quadratic region, e = 0.5") {
    std::vector<double> g;
    const double loss = huber_loss<double>({0.5}, {0.0}, g);
    CHECK(loss == doctest::Approx(0.125));  // e^2 / 2
    CHECK(g[0] == doctest::Approx(0.5));
}

TEST_CASE("huber loss: shape mismatch raises") {
    std::vector<double> g;
    CHECK_THROWS_AS(huber_loss<double>({1.0, 2.0}, {1.0}, g), ShapeError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    std::vector<TensorT<double>> w{TensorT<double>({2})};
    w[0][0] = 0.7;
    w[0][1] = -0.3;
    auto st = AdamState<double>::shaped_like(w);
    st.m[0][0] = 0.5;  // pre-existing moment decays toward zero
    AdamConfig cfg;
    cfg.lr = 0.0;  // isolate the moment update
    adam_step(w, zeros_like(w), st, cfg);
    CHECK(w[0][0] == 0.7);
    CHECK(w[0][1] == -0.3);
    CHECK(st.m[0][0] == doctest::Approx(0.45));  // beta1 * m
    CHECK(st.timestep == 1);
}

TEST_CASE("adam: first step is a bias-corrected sign-like step of size lr") {
    std::vector<TensorT<double>> w{TensorT<double>({1})};
    w[0][0] = 1.0;
    auto st = AdamState<double>::shaped_like(w);
    AdamConfig cfg;
    cfg.lr = 0.1;
    std::vector<TensorT<double>> g{TensorT<double>({1})};
    g[0][0] = 0.004;  // any positive gradient: bias correction gives mhat = g
    adam_step(w, g, st, cfg);
    CHECK(w[0][0] == doctest::Approx(1.0 - 0.1).epsilon(1e-3));
}

TEST_CASE("adam: 100 steps on w^2 from w=1 converge near zero") {
    // Scalar optimization pinned from a reference run: w = 0.002936676.
    std::vector<TensorT<double>> w{TensorT<double>({1})};
    w[0][0] = 1.0;
    auto st = AdamState<double>::shaped_like(w);
    AdamConfig cfg;
    cfg.lr = 0.1;
    for (int i = 0; i < 100; ++i) {
        std::vector<TensorT<double>> g{TensorT<double>({1})};
        g[0][0] = 2.0 * w[0][0];
        adam_step(w, g, st, cfg);
    }
    CHECK(std::abs(w[0][0]) < 0.2);
    CHECK(w[0][0] == doctest::Approx(0.002936676).epsilon(1e-6));
    CHECK(st.timestep == 100);
}

TEST_CASE("adam: non-finite gradient raises a numeric error") {
    std::vector<TensorT<double>> w{TensorT<double>({1})};
    auto st = AdamState<double>::shaped_like(w);
    std::vector<TensorT<double>> g{TensorT<double>({1})};
    g[0][0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(adam_step(w, g, st, AdamConfig{}), NumericError);
}
