#ifndef GLIMPSE_TRAINER_HPP
#define GLIMPSE_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "glimpse/agent.hpp"
#include "glimpse/observe.hpp"
#include "glimpse/pong.hpp"

namespace glimpse {

enum class Phase : int { FullyObservable = 0, Occluded = 1 };

inline const char* phase_name(Phase p) {
    return p == Phase::FullyObservable ? "fully_observable" : "occluded";
}

enum class CurriculumTrigger : int { EpisodeCount = 0, ScoreThreshold = 1 };

struct CurriculumConfig {
    bool enabled = false;
    CurriculumTrigger trigger = CurriculumTrigger::EpisodeCount;
    int episodes = 500;      // EpisodeCount: occlusion starts at episode n+1
    double threshold = 20.0; // ScoreThreshold: mean eval score to beat
    int window = 10;         // eval episodes in the threshold mean

    void validate() const {
        if (episodes < 0) throw ConfigError("curriculum.episodes must be >= 0");
        if (threshold < 1 || threshold > 21)
            throw ConfigError("curriculum.threshold out of [1,21]");
        if (window < 1) throw ConfigError("curriculum.window must be >= 1");
    }
};

struct TrainConfig {
    int total_episodes = 1000;
    MaskFamily mask_family = MaskFamily::Vertical;
    CombineMode combine_mode = CombineMode::FlattenSum;
    int eval_every = 25;
    int eval_episodes = 10;
    double eval_epsilon = 0.05;
    std::uint32_t seed = 0;
    int checkpoint_every = 100;
    bool log_wall_time = true;

    void validate() const {
        if (total_episodes < 1) throw ConfigError("train.total_episodes must be >= 1");
        if (eval_every < 1 || eval_episodes < 1 || checkpoint_every < 1)
            throw ConfigError("train: cadences must be >= 1");
        if (eval_epsilon < 0 || eval_epsilon > 1)
            throw ConfigError("train.eval_epsilon out of [0,1]");
    }
};

/// During the fully observable phase the mask head still chooses, but its
/// choice has no observational effect.
inline MaskId phase_mask_override(Phase phase, MaskId chosen) {
    return phase == Phase::FullyObservable ? MaskId::Identity : chosen;
}

/// Monotone phase update, evaluated at the start of each episode
/// (1-indexed). EpisodeCount(n): episodes 1..n are fully observable.
inline Phase curriculum_update(Phase phase, int episode_index,
                               std::optional<double> latest_eval_mean,
                               const CurriculumConfig& cfg) {
    if (phase == Phase::Occluded) return phase;
    if (!cfg.enabled) return Phase::Occluded;
    switch (cfg.trigger) {
        case CurriculumTrigger::EpisodeCount:
            if (episode_index > cfg.episodes) return Phase::Occluded;
            break;
        case CurriculumTrigger::ScoreThreshold:
            if (latest_eval_mean && *latest_eval_mean >= cfg.threshold)
                return Phase::Occluded;
            break;
    }
    return phase;
}

struct MaskHistogram {
    MaskFamily family = MaskFamily::Vertical;
    std::array<std::int64_t, 3> counts{};  // family_masks order

    std::int64_t total() const { return counts[0] + counts[1] + counts[2]; }
};

struct EvalResult {
    std::vector<int> scores;  // per episode, agent - opponent
    MaskHistogram histogram;
};

struct TraceFrame {
    Frame84 frame;   // masked observation as the agent saw it
    MaskId mask = MaskId::Identity;
    int reward = 0;  // point event on the step that produced this frame
};

/// Runs greedy-with-epsilon evaluation episodes on fresh seeded
/// environments. No learning. Every mask decision is counted; `trace`
/// (when non-null) receives the newest observation frame of every step.
inline EvalResult evaluate(const QNet& net, const EnvConfig& env_cfg,
                           MaskFamily family, CombineMode mode, Phase phase,
                           int episodes, double epsilon, std::uint32_t seed,
                           std::vector<TraceFrame>* trace = nullptr) {
    EvalResult result;
    result.histogram.family = family;
    const auto masks = family_masks(family);
    Rng rng(seed ^ 0x5eed5eedu);
    std::vector<float> input;
    QNet::Cache cache;
    for (int ep = 0; ep < episodes; ++ep) {
        auto [st, raw] = reset(env_cfg, seed + static_cast<std::uint32_t>(ep));
        const MaskId m0 = phase_mask_override(phase, masks[0]);
        ObsStack stack = ObsStack::filled(
            StoredFrame::quantize(apply_mask(preprocess(raw), m0), m0));
        int score = 0;
        while (true) {
            stack.to_input(input);
            const QOutput q = net.forward(input, cache);
            const CombinedAction act = select_action(q, epsilon, rng, mode);
            result.histogram.counts[act.mask_index] += 1;
            const StepResult res = step(env_cfg, st, act.game_action());
            const MaskId eff = phase_mask_override(phase, masks[act.mask_index]);
            const Frame84 masked = apply_mask(preprocess(res.frame), eff);
            stack = stack.pushed(StoredFrame::quantize(masked, eff));
            score += res.reward;
            if (trace) trace->push_back({masked, eff, res.reward});
            if (res.done) break;
        }
        result.scores.push_back(score);
    }
    return result;
}

inline double mean_score(const std::vector<int>& scores) {
    double s = 0;
    for (int v : scores) s += v;
    return scores.empty() ? 0.0 : s / scores.size();
}

}  // namespace glimpse

#endif
