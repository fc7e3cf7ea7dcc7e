#ifndef GLIMPSE_OPTIM_HPP
#define GLIMPSE_OPTIM_HPP

#include <cmath>
#include <vector>

#include "glimpse/tensor.hpp"

namespace glimpse {

/// Elementwise Huber loss, mean-reduced. Returns the loss and writes
/// d(loss)/d(pred) into `grad` (same length as pred).
template <typename T>
double huber_loss(const std::vector<T>& pred, const std::vector<T>& target,
                  std::vector<T>& grad, double delta = 1.0) {
    if (pred.size() != target.size())
        throw ShapeError("huber_loss: shape mismatch");
    grad.assign(pred.size(), T{0});
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
        const double ae = std::abs(e);
        if (ae <= delta) {
            loss += 0.5 * e * e;
            grad[i] = static_cast<T>(e * inv_n);
        } else {
            loss += delta * (ae - 0.5 * delta);
            grad[i] = static_cast<T>((e > 0 ? delta : -delta) * inv_n);
        }
    }
    return loss * inv_n;
}

template <typename T>
struct AdamState {
    std::vector<TensorT<T>> m;
    std::vector<TensorT<T>> v;
    std::uint64_t timestep = 0;

    static AdamState shaped_like(const std::vector<TensorT<T>>& params) {
        AdamState s;
        s.m = zeros_like(params);
        s.v = zeros_like(params);
        return s;
    }
};

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update, in place.
template <typename T>
void adam_step(std::vector<TensorT<T>>& params,
               const std::vector<TensorT<T>>& grads, AdamState<T>& state,
               const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw ShapeError("adam_step: layout mismatch");
    state.timestep += 1;
    const double t = static_cast<double>(state.timestep);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = params[p];
        const auto& g = grads[p];
        auto& m = state.m[p];
        auto& v = state.v[p];
        if (w.size() != g.size()) throw ShapeError("adam_step: grad shape mismatch");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            if (!std::isfinite(gi)) throw NumericError("adam_step: non-finite gradient");
            const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double mhat = mi / bc1;
            const double vhat = vi / bc2;
            w[i] = static_cast<T>(w[i] - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

}  // namespace glimpse

#endif
