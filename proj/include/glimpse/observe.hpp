#ifndef GLIMPSE_OBSERVE_HPP
#define GLIMPSE_OBSERVE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>

#include "glimpse/pong.hpp"
#include "glimpse/tensor.hpp"

namespace glimpse {

constexpr int kObsSize = 84;
constexpr int kObsPixels = kObsSize * kObsSize;  // 7056
constexpr int kStackFrames = 4;
constexpr int kBand = kObsSize / 3;  // 84 divides by 3 exactly

struct Frame84 {
    std::array<float, kObsPixels> px{};

    float at(int row, int col) const { return px[row * kObsSize + col]; }
    float& at(int row, int col) { return px[row * kObsSize + col]; }
};

enum class MaskFamily : int { Horizontal = 0, Vertical = 1 };

enum class MaskId : int {
    HTop = 0,
    HMid = 1,
    HBot = 2,
    VLeft = 3,
    VMid = 4,
    VRight = 5,
    Identity = 6,
};

inline const char* mask_name(MaskId m) {
    switch (m) {
        case MaskId::HTop: return "HTop";
        case MaskId::HMid: return "HMid";
        case MaskId::HBot: return "HBot";
        case MaskId::VLeft: return "VLeft";
        case MaskId::VMid: return "VMid";
        case MaskId::VRight: return "VRight";
        case MaskId::Identity: return "Identity";
    }
    return "?";
}

/// The 3 selectable masks of a family; list position is the mask head's
/// action index.
inline std::array<MaskId, 3> family_masks(MaskFamily f) {
    if (f == MaskFamily::Horizontal)
        return {MaskId::HTop, MaskId::HMid, MaskId::HBot};
    return {MaskId::VLeft, MaskId::VMid, MaskId::VRight};
}

/// True if the mask keeps the pixel at (row, col).
inline bool mask_visible(MaskId m, int row, int col) {
    switch (m) {
        case MaskId::HTop: return row < kBand;
        case MaskId::HMid: return row >= kBand && row < 2 * kBand;
        case MaskId::HBot: return row >= 2 * kBand;
        case MaskId::VLeft: return col < kBand;
        case MaskId::VMid: return col >= kBand && col < 2 * kBand;
        case MaskId::VRight: return col >= 2 * kBand;
        case MaskId::Identity: return true;
    }
    return true;
}

inline Frame84 apply_mask(const Frame84& f, MaskId m) {
    if (m == MaskId::Identity) return f;
    Frame84 out;
    for (int r = 0; r < kObsSize; ++r)
        for (int c = 0; c < kObsSize; ++c)
            out.at(r, c) = mask_visible(m, r, c) ? f.at(r, c) : 0.0f;
    return out;
}

/// Area-average resample of a raw frame to 84x84. Exact for the identity
/// case and preserves constant frames.
inline Frame84 preprocess(const RawFrame& raw) {
    if (raw.width <= 0 || raw.height <= 0)
        throw ShapeError("preprocess: empty frame");
    Frame84 out;
    if (raw.width == kObsSize && raw.height == kObsSize) {
        for (int i = 0; i < kObsPixels; ++i) out.px[i] = raw.pixels[i];
        return out;
    }
    const double sx = static_cast<double>(raw.width) / kObsSize;
    const double sy = static_cast<double>(raw.height) / kObsSize;
    for (int r = 0; r < kObsSize; ++r) {
        const double y0 = r * sy, y1 = (r + 1) * sy;
        for (int c = 0; c < kObsSize; ++c) {
            const double x0 = c * sx, x1 = (c + 1) * sx;
            double acc = 0.0;
            for (int y = static_cast<int>(y0); y < y1 && y < raw.height; ++y) {
                const double wy =
                    std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0) continue;
                for (int x = static_cast<int>(x0); x < x1 && x < raw.width; ++x) {
                    const double wx =
                        std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx <= 0) continue;
                    acc += wx * wy *
                           raw.pixels[static_cast<std::size_t>(y) * raw.width + x];
                }
            }
            out.at(r, c) = static_cast<float>(acc / (sx * sy));
        }
    }
    return out;
}

/// Frame as held in the replay memory: 8-bit quantized, with the mask it
/// was captured under. Shared between the stacks that reference it.
struct StoredFrame {
    std::array<std::uint8_t, kObsPixels> px{};
    MaskId mask = MaskId::Identity;

    static std::shared_ptr<const StoredFrame> quantize(const Frame84& f,
                                                       MaskId m) {
        auto out = std::make_shared<StoredFrame>();
        for (int i = 0; i < kObsPixels; ++i)
            out->px[i] = static_cast<std::uint8_t>(
                std::lround(std::clamp(f.px[i], 0.0f, 1.0f) * 255.0f));
        out->mask = m;
        return out;
    }

    float value(int i) const { return px[i] * (1.0f / 255.0f); }
};

/// The last 4 captured frames, oldest first, each with mask provenance.
struct ObsStack {
    std::array<std::shared_ptr<const StoredFrame>, kStackFrames> frames;

    static ObsStack filled(std::shared_ptr<const StoredFrame> f) {
        ObsStack s;
        s.frames.fill(std::move(f));
        return s;
    }

    ObsStack pushed(std::shared_ptr<const StoredFrame> f) const {
        ObsStack s;
        for (int i = 0; i + 1 < kStackFrames; ++i) s.frames[i] = frames[i + 1];
        s.frames[kStackFrames - 1] = std::move(f);
        return s;
    }

    MaskId provenance(int i) const { return frames[i]->mask; }

    /// Network input: 4 channels of 84x84, oldest first.
    void to_input(std::vector<float>& out) const {
        out.resize(static_cast<std::size_t>(kStackFrames) * kObsPixels);
        for (int f = 0; f < kStackFrames; ++f) {
            const auto& fr = *frames[f];
            float* dst = out.data() + static_cast<std::size_t>(f) * kObsPixels;
            for (int i = 0; i < kObsPixels; ++i) dst[i] = fr.px[i] * (1.0f / 255.0f);
        }
    }
};

}  // namespace glimpse

#endif
