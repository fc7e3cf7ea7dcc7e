#ifndef GLIMPSE_NET_HPP
#define GLIMPSE_NET_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "glimpse/layers.hpp"
#include "glimpse/tensor.hpp"

namespace glimpse {

/// Feed-forward chain of Conv2D / Dense / ReLU / Flatten layers with exact
/// backpropagation. Owns its parameters; gradients and optimizer moments
/// live in parallel vectors with the same layout (see param_count()).
template <typename T>
class Sequential {
public:
    struct LayerGeom {
        LayerSpec spec;
        DataShape in, out;
        int param_index = -1;  // index of weight tensor; bias follows at +1
    };

    /// Forward-pass scratch: input to every layer plus im2col buffers.
    struct Cache {
        std::vector<std::vector<T>> acts;  // acts[i] = input to layer i
        std::vector<std::vector<T>> cols;  // im2col buffer per conv layer
        std::vector<T> out;
    };

    Sequential() = default;

    Sequential(DataShape input, std::vector<LayerSpec> specs) {
        DataShape cur = input;
        for (const auto& spec : specs) {
            LayerGeom g;
            g.spec = spec;
            g.in = cur;
            switch (spec.kind) {
                case LayerKind::Conv2D: {
                    if (!cur.spatial)
                        throw ShapeError("Conv2D requires a spatial input");
                    if (spec.kernel > cur.h || spec.kernel > cur.w)
                        throw ShapeError("kernel larger than input");
                    if (spec.stride < 1) throw ShapeError("stride must be >= 1");
                    const int oh = (cur.h - spec.kernel) / spec.stride + 1;
                    const int ow = (cur.w - spec.kernel) / spec.stride + 1;
                    g.out = DataShape::volume(spec.out_channels, oh, ow);
                    g.param_index = static_cast<int>(params_.size());
                    const std::size_t kk =
                        static_cast<std::size_t>(cur.c) * spec.kernel * spec.kernel;
                    params_.emplace_back(std::vector<std::size_t>{
                        static_cast<std::size_t>(spec.out_channels), kk});
                    params_.emplace_back(std::vector<std::size_t>{
                        static_cast<std::size_t>(spec.out_channels)});
                    break;
                }
                case LayerKind::Dense: {
                    const int in_n = cur.count();
                    g.out = DataShape::vec(spec.out_units);
                    g.param_index = static_cast<int>(params_.size());
                    params_.emplace_back(std::vector<std::size_t>{
                        static_cast<std::size_t>(spec.out_units),
                        static_cast<std::size_t>(in_n)});
                    params_.emplace_back(std::vector<std::size_t>{
                        static_cast<std::size_t>(spec.out_units)});
                    break;
                }
                case LayerKind::ReLU:
                    g.out = cur;
                    break;
                case LayerKind::Flatten:
                    g.out = DataShape::vec(cur.count());
                    break;
            }
            cur = g.out;
            layers_.push_back(std::move(g));
        }
        output_ = cur;
    }

    const DataShape& output_shape() const { return output_; }
    const std::vector<LayerGeom>& layers() const { return layers_; }
    std::vector<TensorT<T>>& params() { return params_; }
    const std::vector<TensorT<T>>& params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    /// He-uniform weights, zero biases; fully determined by the seed.
    void init(std::uint32_t seed) {
        Rng rng(seed);
        for (const auto& g : layers_) {
            if (g.param_index < 0) continue;
            auto& w = params_[g.param_index];
            auto& b = params_[g.param_index + 1];
            const std::size_t fan_in = w.shape[1];
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
            for (auto& v : w.data)
                v = static_cast<T>(rand_range(rng, -limit, limit));
            b.fill(T{0});
        }
    }

    void forward(const std::vector<T>& x, Cache& cache) const {
        if (!layers_.empty() &&
            static_cast<int>(x.size()) != layers_.front().in.count())
            throw ShapeError("forward: input size mismatch");
        cache.acts.resize(layers_.size());
        cache.cols.resize(layers_.size());
        std::vector<T> cur = x;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const auto& g = layers_[i];
            cache.acts[i] = std::move(cur);
            std::vector<T> next;
            switch (g.spec.kind) {
                case LayerKind::Conv2D: {
                    const auto& w = params_[g.param_index];
                    const auto& b = params_[g.param_index + 1];
                    const int k = g.spec.kernel, s = g.spec.stride;
                    const int oh = g.out.h, ow = g.out.w, patch = oh * ow;
                    const int kdim = static_cast<int>(w.shape[1]);
                    auto& cols = cache.cols[i];
                    cols.assign(static_cast<std::size_t>(kdim) * patch, T{0});
                    im2col(cache.acts[i].data(), cols.data(), g.in.c, g.in.h,
                           g.in.w, k, s, oh, ow);
                    next.resize(static_cast<std::size_t>(g.out.c) * patch);
                    for (int oc = 0; oc < g.out.c; ++oc)
                        for (int p = 0; p < patch; ++p)
                            next[static_cast<std::size_t>(oc) * patch + p] = b[oc];
                    gemm(w.ptr(), cols.data(), next.data(), g.out.c, kdim, patch);
                    break;
                }
                case LayerKind::Dense: {
                    const auto& w = params_[g.param_index];
                    const auto& b = params_[g.param_index + 1];
                    const int in_n = static_cast<int>(w.shape[1]);
                    const int out_n = static_cast<int>(w.shape[0]);
                    next.assign(b.data.begin(), b.data.end());
                    // y[o] += dot(W[o,:], x); dot form vectorizes
                    gemm_abt(w.ptr(), cache.acts[i].data(), next.data(), out_n,
                             in_n, 1);
                    break;
                }
                case LayerKind::ReLU: {
                    next = cache.acts[i];
                    for (auto& v : next)
                        if (v < T{0}) v = T{0};
                    break;
                }
                case LayerKind::Flatten:
                    next = cache.acts[i];
                    break;
            }
            cur = std::move(next);
        }
        cache.out = std::move(cur);
        if (layers_.empty()) cache.out = x;
    }

    /// Accumulates parameter gradients into `grads` (same layout as
    /// params()) and writes the input gradient to `dx`.
    void backward(const std::vector<T>& dy, const Cache& cache,
                  std::vector<TensorT<T>>& grads, std::vector<T>& dx,
                  bool need_input_grad = true) const {
        std::vector<T> cur = dy;
        for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
            const auto& g = layers_[i];
            std::vector<T> next(static_cast<std::size_t>(g.in.count()), T{0});
            switch (g.spec.kind) {
                case LayerKind::Conv2D: {
                    const auto& w = params_[g.param_index];
                    auto& dw = grads[g.param_index];
                    auto& db = grads[g.param_index + 1];
                    const int k = g.spec.kernel, s = g.spec.stride;
                    const int oh = g.out.h, ow = g.out.w, patch = oh * ow;
                    const int kdim = static_cast<int>(w.shape[1]);
                    const auto& cols = cache.cols[i];
                    // db
                    for (int oc = 0; oc < g.out.c; ++oc) {
                        T s_acc{0};
                        const T* row = cur.data() + static_cast<std::size_t>(oc) * patch;
                        for (int p = 0; p < patch; ++p) s_acc += row[p];
                        db[oc] += s_acc;
                    }
                    // dW += dy * cols^T
                    gemm_abt(cur.data(), cols.data(), dw.ptr(), g.out.c, patch,
                             kdim);
                    if (i > 0 || need_input_grad) {
                        // dcols = W^T * dy, then scatter back to dx
                        std::vector<T> dcols(
                            static_cast<std::size_t>(kdim) * patch, T{0});
                        gemm_atb(w.ptr(), cur.data(), dcols.data(), g.out.c,
                                 kdim, patch);
                        col2im_acc(dcols.data(), next.data(), g.in.c, g.in.h,
                                   g.in.w, k, s, oh, ow);
                    }
                    break;
                }
                case LayerKind::Dense: {
                    const auto& w = params_[g.param_index];
                    auto& dw = grads[g.param_index];
                    auto& db = grads[g.param_index + 1];
                    const int in_n = static_cast<int>(w.shape[1]);
                    const int out_n = static_cast<int>(w.shape[0]);
                    for (int o = 0; o < out_n; ++o) db[o] += cur[o];
                    // dW[o,j] += dy[o] * x[j]
                    gemm(cur.data(), cache.acts[i].data(), dw.ptr(), out_n, 1,
                         in_n);
                    // dx[1,in] += dy[1,out] * W[out,in]
                    gemm(cur.data(), w.ptr(), next.data(), 1, out_n, in_n);
                    break;
                }
                case LayerKind::ReLU: {
                    const auto& x = cache.acts[i];
                    for (std::size_t j = 0; j < cur.size(); ++j)
                        next[j] = x[j] > T{0} ? cur[j] : T{0};
                    break;
                }
                case LayerKind::Flatten:
                    next = cur;
                    break;
            }
            cur.swap(next);
        }
        dx.swap(cur);
    }

private:
    std::vector<LayerGeom> layers_;
    std::vector<TensorT<T>> params_;
    DataShape output_;
    mutable std::vector<T> scratch_;
};

}  // namespace glimpse

#endif
