#ifndef GLIMPSE_GRADCHECK_HPP
#define GLIMPSE_GRADCHECK_HPP

#include <algorithm>
#include <vector>

#include "glimpse/net.hpp"
#include "glimpse/optim.hpp"
#include "glimpse/tensor.hpp"

namespace glimpse {

/// Compares analytic gradients of a small random instance of `specs`
/// against central finite differences (64-bit, step `fd_eps`) over every
/// parameter and the input. Scalar objective: Huber loss of the chain
/// output against a random target. Returns the worst relative error.
inline double grad_check(DataShape input, const std::vector<LayerSpec>& specs,
                         std::uint32_t seed, double fd_eps = 1e-5) {
    Sequential<double> net(input, specs);
    net.init(seed);
    Rng rng(seed ^ 0x9e3779b9u);
    // nonzero biases so their gradients are exercised off the origin
    for (auto& p : net.params())
        for (auto& v : p.data) v += rand_range(rng, -0.05, 0.05);

    std::vector<double> x(static_cast<std::size_t>(input.count()));
    for (auto& v : x) v = rand_range(rng, -1.0, 1.0);
    std::vector<double> target(
        static_cast<std::size_t>(net.output_shape().count()));
    for (auto& v : target) v = rand_range(rng, -2.0, 2.0);

    auto objective = [&]() {
        Sequential<double>::Cache cache;
        net.forward(x, cache);
        std::vector<double> g;
        return huber_loss(cache.out, target, g);
    };

    // analytic
    Sequential<double>::Cache cache;
    net.forward(x, cache);
    std::vector<double> dy;
    huber_loss(cache.out, target, dy);
    auto grads = zeros_like(net.params());
    std::vector<double> dx;
    net.backward(dy, cache, grads, dx);

    double worst = 0.0;
    auto check = [&](double analytic, double* slot) {
        const double save = *slot;
        *slot = save + fd_eps;
        const double lp = objective();
        *slot = save - fd_eps;
        const double lm = objective();
        *slot = save;
        const double numeric = (lp - lm) / (2.0 * fd_eps);
        const double denom = std::max(1e-6, std::abs(analytic) + std::abs(numeric));
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };

    for (std::size_t p = 0; p < net.params().size(); ++p)
        for (std::size_t i = 0; i < net.params()[p].size(); ++i)
            check(grads[p][i], &net.params()[p].data[i]);
    for (std::size_t i = 0; i < x.size(); ++i) check(dx[i], &x[i]);
    return worst;
}

/// The layer compositions exercised by the `gradcheck` CLI command.
inline double grad_check_suite(std::uint32_t seeds_from, int num_seeds) {
    double worst = 0.0;
    for (int s = 0; s < num_seeds; ++s) {
        const std::uint32_t seed = seeds_from + static_cast<std::uint32_t>(s);
        worst = std::max(worst, grad_check(DataShape::vec(6),
                                           {LayerSpec::dense(4)}, seed));
        worst = std::max(
            worst, grad_check(DataShape::vec(5),
                              {LayerSpec::dense(7), LayerSpec::relu(),
                               LayerSpec::dense(3)},
                              seed));
        worst = std::max(
            worst, grad_check(DataShape::volume(2, 7, 7),
                              {LayerSpec::conv(3, 3, 2), LayerSpec::relu(),
                               LayerSpec::flatten(), LayerSpec::dense(4)},
                              seed));
        worst = std::max(
            worst,
            grad_check(DataShape::volume(1, 10, 10),
                       {LayerSpec::conv(2, 4, 2), LayerSpec::relu(),
                        LayerSpec::conv(3, 2, 1), LayerSpec::relu(),
                        LayerSpec::flatten(), LayerSpec::dense(5),
                        LayerSpec::relu(), LayerSpec::dense(2)},
                       seed));
    }
    return worst;
}

}  // namespace glimpse

#endif
