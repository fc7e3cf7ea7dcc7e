#ifndef GLIMPSE_PGM_HPP
#define GLIMPSE_PGM_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "glimpse/observe.hpp"

namespace glimpse {

/// Binary PGM (P5), maxval 255. An 84x84 frame is exactly 13 header bytes
/// ("P5\n84 84\n255\n") plus 7056 payload bytes.
inline void write_pgm(const std::string& path, const Frame84& frame) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("pgm: cannot open for writing: " + path);
    os << "P5\n" << kObsSize << ' ' << kObsSize << "\n255\n";
    for (int i = 0; i < kObsPixels; ++i) {
        const auto v = static_cast<std::uint8_t>(
            std::lround(std::clamp(frame.px[i], 0.0f, 1.0f) * 255.0f));
        os.put(static_cast<char>(v));
    }
    if (!os) throw IoError("pgm: write failed: " + path);
}

}  // namespace glimpse

#endif
