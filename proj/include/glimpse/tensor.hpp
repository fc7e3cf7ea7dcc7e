#ifndef GLIMPSE_TENSOR_HPP
#define GLIMPSE_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace glimpse {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic RNG helpers. We draw from mt19937 directly instead of
// std::uniform_* distributions so sequences do not depend on the stdlib.
using Rng = std::mt19937;

inline double rand_unit(Rng& rng) {
    return rng() * (1.0 / 4294967296.0);  // [0, 1)
}

inline double rand_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rand_unit(rng);
}

inline std::size_t rand_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng()) % n;
}

inline bool rand_bernoulli(Rng& rng, double p) {
    return rand_unit(rng) < p;
}

/// Dense row-major tensor, templated on scalar type: float for training,
/// double for gradient checking.
template <typename T>
struct TensorT {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<std::size_t> s)
        : shape(std::move(s)),
          data(std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<>()),
               T{0}) {}

    std::size_t size() const { return data.size(); }
    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }
    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    void ensure_finite(const std::string& what) const {
        if (!finite()) throw NumericError("non-finite values in " + what);
    }

    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out(shape);
        for (std::size_t i = 0; i < data.size(); ++i)
            out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

template <typename T>
std::vector<TensorT<T>> zeros_like(const std::vector<TensorT<T>>& ps) {
    std::vector<TensorT<T>> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.emplace_back(p.shape);
    return out;
}

}  // namespace glimpse

#endif
