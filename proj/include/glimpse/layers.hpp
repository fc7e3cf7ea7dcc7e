#ifndef GLIMPSE_LAYERS_HPP
#define GLIMPSE_LAYERS_HPP

#include <cassert>
#include <cstring>
#include <vector>

#include "glimpse/tensor.hpp"

namespace glimpse {

// --- small GEMM kernels; n-contiguous inner loops vectorize under -O3 ---

// C[M,N] += A[M,K] * B[K,N]
template <typename T>
void gemm(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, int m_dim, int k_dim, int n_dim) {
    for (int m = 0; m < m_dim; ++m) {
        T* __restrict__ crow = c + static_cast<std::size_t>(m) * n_dim;
        for (int k = 0; k < k_dim; ++k) {
            const T av = a[static_cast<std::size_t>(m) * k_dim + k];
            const T* brow = b + static_cast<std::size_t>(k) * n_dim;
            for (int n = 0; n < n_dim; ++n) crow[n] += av * brow[n];
        }
    }
}

// C[M,K] += A[M,N] * B[K,N]^T
// Lane-split dot product: a fixed reassociation the compiler can map to
// vector registers, identical result on every run.
template <typename T>
void gemm_abt(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, int m_dim, int n_dim, int k_dim) {
    constexpr int kLanes = 16;
    for (int m = 0; m < m_dim; ++m) {
        const T* arow = a + static_cast<std::size_t>(m) * n_dim;
        for (int k = 0; k < k_dim; ++k) {
            const T* brow = b + static_cast<std::size_t>(k) * n_dim;
            T lanes[kLanes] = {};
            int n = 0;
            for (; n + kLanes <= n_dim; n += kLanes)
                for (int j = 0; j < kLanes; ++j)
                    lanes[j] += arow[n + j] * brow[n + j];
            T s{0};
            for (; n < n_dim; ++n) s += arow[n] * brow[n];
            for (int j = 0; j < kLanes; ++j) s += lanes[j];
            c[static_cast<std::size_t>(m) * k_dim + k] += s;
        }
    }
}

// C[K,N] += A[M,K]^T * B[M,N]
template <typename T>
void gemm_atb(const T* __restrict__ a, const T* __restrict__ b, T* __restrict__ c, int m_dim, int k_dim, int n_dim) {
    for (int m = 0; m < m_dim; ++m) {
        const T* brow = b + static_cast<std::size_t>(m) * n_dim;
        for (int k = 0; k < k_dim; ++k) {
            const T av = a[static_cast<std::size_t>(m) * k_dim + k];
            T* crow = c + static_cast<std::size_t>(k) * n_dim;
            for (int n = 0; n < n_dim; ++n) crow[n] += av * brow[n];
        }
    }
}

// --- im2col for valid (no padding) convolution ---

template <typename T>
void im2col(const T* x, T* cols, int chans, int h, int w, int k, int s,
            int oh, int ow) {
    const int patch = oh * ow;
    for (int c = 0; c < chans; ++c) {
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                T* dst = cols + static_cast<std::size_t>((c * k + ki) * k + kj) * patch;
                for (int oi = 0; oi < oh; ++oi) {
                    const T* src = x + static_cast<std::size_t>(c) * h * w +
                                   static_cast<std::size_t>(oi * s + ki) * w + kj;
                    for (int oj = 0; oj < ow; ++oj) dst[oi * ow + oj] = src[oj * s];
                }
            }
        }
    }
}

template <typename T>
void col2im_acc(const T* cols, T* x, int chans, int h, int w, int k, int s,
                int oh, int ow) {
    const int patch = oh * ow;
    for (int c = 0; c < chans; ++c) {
        for (int ki = 0; ki < k; ++ki) {
            for (int kj = 0; kj < k; ++kj) {
                const T* src = cols + static_cast<std::size_t>((c * k + ki) * k + kj) * patch;
                for (int oi = 0; oi < oh; ++oi) {
                    T* dst = x + static_cast<std::size_t>(c) * h * w +
                             static_cast<std::size_t>(oi * s + ki) * w + kj;
                    for (int oj = 0; oj < ow; ++oj) dst[oj * s] += src[oi * ow + oj];
                }
            }
        }
    }
}

// --- layer specifications ---

enum class LayerKind { Conv2D, Dense, ReLU, Flatten };

struct LayerSpec {
    LayerKind kind;
    int out_channels = 0;  // Conv2D
    int kernel = 0;        // Conv2D
    int stride = 1;        // Conv2D
    int out_units = 0;     // Dense

    static LayerSpec conv(int out_channels, int kernel, int stride) {
        return {LayerKind::Conv2D, out_channels, kernel, stride, 0};
    }
    static LayerSpec dense(int units) {
        return {LayerKind::Dense, 0, 0, 1, units};
    }
    static LayerSpec relu() { return {LayerKind::ReLU, 0, 0, 1, 0}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0, 1, 0}; }
};

/// Shape of the data flowing between layers: either a c*h*w volume or a
/// flat vector (spatial == false).
struct DataShape {
    bool spatial = false;
    int c = 0, h = 0, w = 0;
    int flat = 0;

    int count() const { return spatial ? c * h * w : flat; }
    static DataShape volume(int c, int h, int w) { return {true, c, h, w, 0}; }
    static DataShape vec(int n) { return {false, 0, 0, 0, n}; }
};

}  // namespace glimpse

#endif
