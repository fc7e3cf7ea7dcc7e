#ifndef GLIMPSE_CHECKPOINT_HPP
#define GLIMPSE_CHECKPOINT_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "glimpse/agent.hpp"
#include "glimpse/trainer.hpp"

namespace glimpse {

constexpr char kCheckpointMagic[4] = {'O', 'P', 'D', 'Q'};
constexpr std::uint32_t kCheckpointVersion = 1;

/// Full training snapshot: online net, target net, Adam moments, and the
/// loop counters needed to resume. Binary layout: magic, version, header
/// fields, then length-prefixed named tensor records with little-endian
/// float32 payloads.
struct Checkpoint {
    std::uint64_t seed = 0;
    Phase phase = Phase::Occluded;
    std::uint64_t episode_index = 0;
    std::uint64_t global_step = 0;
    MaskFamily mask_family = MaskFamily::Vertical;
    CombineMode combine_mode = CombineMode::FlattenSum;
    QNet net;
    QNet target;
    AgentOptimizer adam;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("checkpoint: truncated file");
    return v;
}

inline void write_tensor(std::ostream& os, const std::string& name,
                         const Tensor& t) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) write_pod<std::uint64_t>(os, d);
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * sizeof(float)));
}

inline void read_tensor(std::istream& is, const std::string& expect_name,
                        Tensor& t) {
    const auto name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw IoError("checkpoint: truncated tensor name");
    if (name != expect_name)
        throw IoError("checkpoint: tensor order mismatch, expected " +
                      expect_name + " got " + name);
    const auto rank = read_pod<std::uint32_t>(is);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = read_pod<std::uint64_t>(is);
    if (shape != t.shape)
        throw IoError("checkpoint: shape mismatch for " + name);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!is) throw IoError("checkpoint: truncated tensor payload");
}

template <typename Fn>
void visit_checkpoint_tensors(Checkpoint& ck, Fn fn) {
    ck.net.visit_params([&](const std::string& n, Tensor& t) { fn("online." + n, t); });
    ck.target.visit_params(
        [&](const std::string& n, Tensor& t) { fn("target." + n, t); });
    auto walk = [&](const char* prefix, std::vector<Tensor>& ts) {
        for (std::size_t i = 0; i < ts.size(); ++i)
            fn(std::string(prefix) + "." + std::to_string(i), ts[i]);
    };
    walk("adam_m.backbone", ck.adam.bb.m);
    walk("adam_v.backbone", ck.adam.bb.v);
    walk("adam_m.head_game", ck.adam.hg.m);
    walk("adam_v.head_game", ck.adam.hg.v);
    walk("adam_m.head_mask", ck.adam.hm.m);
    walk("adam_v.head_mask", ck.adam.hm.v);
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("checkpoint: cannot open for writing: " + path);
    os.write(kCheckpointMagic, 4);
    detail::write_pod<std::uint32_t>(os, kCheckpointVersion);
    detail::write_pod<std::uint64_t>(os, ck.seed);
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ck.phase));
    detail::write_pod<std::uint64_t>(os, ck.episode_index);
    detail::write_pod<std::uint64_t>(os, ck.global_step);
    detail::write_pod<std::uint32_t>(os,
                                     static_cast<std::uint32_t>(ck.mask_family));
    detail::write_pod<std::uint32_t>(os,
                                     static_cast<std::uint32_t>(ck.combine_mode));
    detail::write_pod<std::uint64_t>(os, ck.adam.timestep());
    std::uint32_t count = 0;
    detail::visit_checkpoint_tensors(ck,
                                     [&](const std::string&, Tensor&) { ++count; });
    detail::write_pod<std::uint32_t>(os, count);
    detail::visit_checkpoint_tensors(ck, [&](const std::string& n, Tensor& t) {
        detail::write_tensor(os, n, t);
    });
    if (!os) throw IoError("checkpoint: write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
        throw IoError("checkpoint: bad magic");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw IoError("checkpoint: version mismatch (got " +
                      std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion) + ")");
    Checkpoint ck;
    ck.seed = detail::read_pod<std::uint64_t>(is);
    ck.phase = static_cast<Phase>(detail::read_pod<std::uint32_t>(is));
    ck.episode_index = detail::read_pod<std::uint64_t>(is);
    ck.global_step = detail::read_pod<std::uint64_t>(is);
    ck.mask_family =
        static_cast<MaskFamily>(detail::read_pod<std::uint32_t>(is));
    ck.combine_mode =
        static_cast<CombineMode>(detail::read_pod<std::uint32_t>(is));
    const auto timestep = detail::read_pod<std::uint64_t>(is);
    ck.adam = AgentOptimizer::shaped_like(ck.net);
    ck.adam.bb.timestep = ck.adam.hg.timestep = ck.adam.hm.timestep = timestep;
    const auto count = detail::read_pod<std::uint32_t>(is);
    std::uint32_t seen = 0;
    detail::visit_checkpoint_tensors(ck, [&](const std::string& n, Tensor& t) {
        detail::read_tensor(is, n, t);
        ++seen;
    });
    if (seen != count) throw IoError("checkpoint: tensor count mismatch");
    return ck;
}

}  // namespace glimpse

#endif
