#ifndef GLIMPSE_CSV_HPP
#define GLIMPSE_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "glimpse/trainer.hpp"

namespace glimpse {

struct MetricsRow {
    int episode = 0;  // 1-indexed
    Phase phase = Phase::Occluded;
    int episode_reward = 0;
    int steps = 0;
    double mean_loss = 0.0;
    double epsilon = 0.0;
    double wall_seconds = 0.0;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_metrics(const std::string& path,
                          const std::vector<MetricsRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("metrics: cannot open for writing: " + path);
    os << "episode,phase,episode_reward,steps,mean_loss,epsilon,wall_seconds\n";
    for (const auto& r : rows) {
        os << r.episode << ',' << phase_name(r.phase) << ',' << r.episode_reward
           << ',' << r.steps << ',' << format_double(r.mean_loss) << ','
           << format_double(r.epsilon) << ',' << format_double(r.wall_seconds)
           << '\n';
    }
    if (!os) throw IoError("metrics: write failed: " + path);
}

inline void write_histogram(const std::string& path, const MaskHistogram& h) {
    std::ofstream os(path);
    if (!os) throw IoError("histogram: cannot open for writing: " + path);
    os << "mask,count\n";
    const auto masks = family_masks(h.family);
    for (int i = 0; i < 3; ++i)
        os << mask_name(masks[i]) << ',' << h.counts[i] << '\n';
    if (!os) throw IoError("histogram: write failed: " + path);
}

}  // namespace glimpse

#endif
