#ifndef GLIMPSE_RUNNER_HPP
#define GLIMPSE_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glimpse/checkpoint.hpp"
#include "glimpse/config.hpp"
#include "glimpse/csv.hpp"
#include "glimpse/pgm.hpp"
#include "glimpse/trainer.hpp"

namespace glimpse {

struct TrainOutput {
    std::vector<MetricsRow> metrics;
    EvalResult final_eval;
    Phase final_phase = Phase::Occluded;
    std::string metrics_path;
    std::string histogram_path;
    std::string final_checkpoint_path;
};

inline std::uint32_t episode_seed(std::uint32_t run_seed, int episode) {
    return run_seed + 2654435761u * static_cast<std::uint32_t>(episode);
}

/// The full training loop: environment + observation pipeline + agent,
/// two-phase curriculum, periodic evaluation and checkpoints. Writes
/// metrics.csv, histogram.csv and checkpoint files under `out_dir`.
inline TrainOutput run_training(
    const RunConfig& cfg, const std::string& out_dir,
    const std::function<void(const MetricsRow&)>& on_episode = nullptr) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    QNet net;
    net.init(cfg.train.seed);
    QNet target = sync_target(net);
    auto adam = AgentOptimizer::shaped_like(net);
    auto grads = QNet::Grads::shaped_like(net);
    ReplayBuffer buffer(cfg.agent.replay_capacity);
    Rng rng(cfg.train.seed ^ 0xA5A5A5A5u);

    const auto masks = family_masks(cfg.train.mask_family);
    Phase phase = cfg.curriculum.enabled ? Phase::FullyObservable : Phase::Occluded;
    std::int64_t global_step = 0;
    std::deque<int> eval_scores;
    std::optional<double> latest_eval_mean;

    TrainOutput out;
    std::vector<float> input;
    QNet::Cache cache;

    auto save_ck = [&](const std::string& name, int episode) {
        Checkpoint ck;
        ck.seed = cfg.train.seed;
        ck.phase = phase;
        ck.episode_index = static_cast<std::uint64_t>(episode);
        ck.global_step = static_cast<std::uint64_t>(global_step);
        ck.mask_family = cfg.train.mask_family;
        ck.combine_mode = cfg.train.combine_mode;
        ck.net = net;
        ck.target = target;
        ck.adam = adam;
        const std::string path = (fs::path(out_dir) / name).string();
        save_checkpoint(path, ck);
        return path;
    };

    for (int ep = 1; ep <= cfg.train.total_episodes; ++ep) {
        phase = curriculum_update(phase, ep, latest_eval_mean, cfg.curriculum);
        const auto t0 = std::chrono::steady_clock::now();

        auto [st, raw] = reset(cfg.env, episode_seed(cfg.train.seed, ep));
        const MaskId m0 = phase_mask_override(phase, masks[0]);
        ObsStack stack = ObsStack::filled(
            StoredFrame::quantize(apply_mask(preprocess(raw), m0), m0));

        int ep_reward = 0, ep_steps = 0;
        double loss_sum = 0.0;
        int loss_count = 0;
        double epsilon = cfg.agent.epsilon_at(global_step);

        while (true) {
            epsilon = cfg.agent.epsilon_at(global_step);
            stack.to_input(input);
            const QOutput q = net.forward(input, cache);
            const CombinedAction act =
                select_action(q, epsilon, rng, cfg.train.combine_mode);

            const StepResult res = step(cfg.env, st, act.game_action());
            const MaskId eff = phase_mask_override(phase, masks[act.mask_index]);
            const ObsStack next_stack = stack.pushed(StoredFrame::quantize(
                apply_mask(preprocess(res.frame), eff), eff));
            buffer.store({stack, act, static_cast<float>(res.reward), next_stack,
                          res.done});
            stack = next_stack;
            ep_reward += res.reward;
            ep_steps += 1;
            global_step += 1;

            if (buffer.size() >= static_cast<std::size_t>(cfg.agent.learn_start) &&
                global_step % cfg.agent.learn_every == 0) {
                loss_sum += learn_step(net, target, buffer, adam, grads,
                                       cfg.agent, cfg.train.combine_mode, rng);
                loss_count += 1;
            }
            if (global_step % cfg.agent.target_sync_period == 0)
                target = sync_target(net);
            if (res.done) break;
        }

        MetricsRow row;
        row.episode = ep;
        row.phase = phase;
        row.episode_reward = ep_reward;
        row.steps = ep_steps;
        row.mean_loss = loss_count ? loss_sum / loss_count : 0.0;
        row.epsilon = epsilon;
        row.wall_seconds =
            cfg.train.log_wall_time
                ? std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                t0)
                      .count()
                : 0.0;
        out.metrics.push_back(row);
        if (on_episode) on_episode(row);

        if (ep % cfg.train.eval_every == 0) {
            const EvalResult ev = evaluate(
                net, cfg.env, cfg.train.mask_family, cfg.train.combine_mode,
                phase, cfg.train.eval_episodes, cfg.train.eval_epsilon,
                episode_seed(cfg.train.seed ^ 0xE7A1u, ep));
            for (int s : ev.scores) eval_scores.push_back(s);
            while (eval_scores.size() >
                   static_cast<std::size_t>(cfg.curriculum.window))
                eval_scores.pop_front();
            double m = 0;
            for (int s : eval_scores) m += s;
            latest_eval_mean = m / static_cast<double>(eval_scores.size());
        }
        if (ep % cfg.train.checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "checkpoint_ep%06d.opdq", ep);
            save_ck(name, ep);
        }
    }

    out.final_phase = phase;
    out.final_checkpoint_path = save_ck("checkpoint_final.opdq",
                                        cfg.train.total_episodes);
    out.final_eval = evaluate(net, cfg.env, cfg.train.mask_family,
                              cfg.train.combine_mode, phase,
                              cfg.train.eval_episodes, cfg.train.eval_epsilon,
                              episode_seed(cfg.train.seed ^ 0xF17A1u,
                                           cfg.train.total_episodes));
    out.metrics_path = (fs::path(out_dir) / "metrics.csv").string();
    out.histogram_path = (fs::path(out_dir) / "histogram.csv").string();
    write_metrics(out.metrics_path, out.metrics);
    write_histogram(out.histogram_path, out.final_eval.histogram);
    return out;
}

/// Replays one greedy evaluation episode from a checkpoint and writes
/// every stride-th observation frame (as the agent saw it) as PGM files.
/// window > 0 restricts output to the `window` decisions leading up to
/// each point the agent scores. Returns the number of files written.
inline int render_sequence(const std::string& checkpoint_path,
                           const EnvConfig& env_cfg, std::uint32_t env_seed,
                           int stride, int window, const std::string& out_dir) {
    if (stride < 1) throw UsageError("render: stride must be >= 1");
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    std::vector<TraceFrame> trace;
    evaluate(ck.net, env_cfg, ck.mask_family, ck.combine_mode, ck.phase, 1,
             0.0, env_seed, &trace);

    std::vector<std::size_t> selected;
    if (window > 0) {
        std::vector<bool> keep(trace.size(), false);
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (trace[i].reward != 1) continue;
            const std::size_t lo =
                i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
            for (std::size_t j = lo; j <= i; ++j) keep[j] = true;
        }
        for (std::size_t i = 0; i < trace.size(); ++i)
            if (keep[i]) selected.push_back(i);
    } else {
        for (std::size_t i = 0; i < trace.size(); ++i) selected.push_back(i);
    }

    std::filesystem::create_directories(out_dir);
    int written = 0;
    for (std::size_t k = 0; k < selected.size(); k += stride) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%05d.pgm", written);
        write_pgm((std::filesystem::path(out_dir) / name).string(),
                  trace[selected[k]].frame);
        ++written;
    }
    return written;
}

/// Mean score of the hand-coded tracker paddle over seeded episodes.
inline double run_sanity(const EnvConfig& cfg, int episodes,
                         std::uint32_t seed) {
    double total = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        auto [st, raw] = reset(cfg, seed + static_cast<std::uint32_t>(ep));
        int score = 0;
        while (!st.done) {
            const StepResult res = step(cfg, st, tracker_policy(cfg, st));
            score += res.reward;
        }
        total += score;
    }
    return total / episodes;
}

/// Mean score of a uniformly random game-action policy.
inline double run_random_baseline(const EnvConfig& cfg, int episodes,
                                  std::uint32_t seed) {
    double total = 0;
    for (int ep = 0; ep < episodes; ++ep) {
        auto [st, raw] = reset(cfg, seed + static_cast<std::uint32_t>(ep));
        Rng rng(seed ^ 0xBA5Eu ^ static_cast<std::uint32_t>(ep * 7919));
        int score = 0;
        while (!st.done) {
            const auto a = static_cast<GameAction>(rand_index(rng, 3));
            const StepResult res = step(cfg, st, a);
            score += res.reward;
        }
        total += score;
    }
    return total / episodes;
}

}  // namespace glimpse

#endif
