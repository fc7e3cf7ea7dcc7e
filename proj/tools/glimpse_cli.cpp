// Command-line front end: training, evaluation, frame rendering, and the
// built-in verification commands (gradcheck / sanity / baseline).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "glimpse/config.hpp"
#include "glimpse/gradcheck.hpp"
#include "glimpse/runner.hpp"

namespace {

glimpse::RunConfig config_or_default(const std::string& path) {
    if (path.empty()) {
        glimpse::RunConfig cfg;
        cfg.validate();
        return cfg;
    }
    return glimpse::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partially observable Pong testbed"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "runs/out", checkpoint_path;
    std::string hist_out = "histogram.csv";
    int episodes = 20;
    int stride = 4, window = 0;
    long long seed = -1;

    auto* train = app.add_subcommand("train", "run the training loop");
    train->add_option("--config", config_path, "run config file")->required();
    train->add_option("--seed", seed, "override train.seed");
    train->add_option("--out", out_dir, "output directory");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();
    eval->add_option("--episodes", episodes, "evaluation episodes")->required();
    eval->add_option("--seed", seed, "evaluation seed");
    eval->add_option("--config", config_path, "run config (for env settings)");
    eval->add_option("--out", hist_out, "histogram CSV path");

    auto* render = app.add_subcommand("render", "write PGM frame sequence");
    render->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();
    render->add_option("--stride", stride, "keep every stride-th frame");
    render->add_option("--window", window,
                       "decisions kept before each scored point (0 = all)");
    render->add_option("--seed", seed, "episode seed");
    render->add_option("--config", config_path, "run config (for env settings)");
    render->add_option("--out", out_dir, "output directory");

    app.add_subcommand("gradcheck", "finite-difference gradient verification");
    app.add_subcommand("sanity", "tracker policy vs the scripted opponent");
    app.add_subcommand("baseline", "random policy mean score");

    try {
        app.parse(argc, argv);

        if (train->parsed()) {
            glimpse::RunConfig cfg = glimpse::load_config(config_path);
            if (seed >= 0) cfg.train.seed = static_cast<std::uint32_t>(seed);
            const auto out = glimpse::run_training(
                cfg, out_dir, [](const glimpse::MetricsRow& r) {
                    std::printf("episode %d  phase=%s  reward=%d  steps=%d  "
                                "loss=%.5f  eps=%.3f\n",
                                r.episode, glimpse::phase_name(r.phase),
                                r.episode_reward, r.steps, r.mean_loss,
                                r.epsilon);
                    std::fflush(stdout);
                });
            std::printf("final eval mean score: %.2f\n",
                        glimpse::mean_score(out.final_eval.scores));
            std::printf("metrics: %s\nhistogram: %s\ncheckpoint: %s\n",
                        out.metrics_path.c_str(), out.histogram_path.c_str(),
                        out.final_checkpoint_path.c_str());
        } else if (eval->parsed()) {
            const glimpse::RunConfig cfg = config_or_default(config_path);
            const auto ck = glimpse::load_checkpoint(checkpoint_path);
            const std::uint32_t s =
                seed >= 0 ? static_cast<std::uint32_t>(seed) : 1u;
            const auto res = glimpse::evaluate(
                ck.net, cfg.env, ck.mask_family, ck.combine_mode, ck.phase,
                episodes, cfg.train.eval_epsilon, s);
            glimpse::write_histogram(hist_out, res.histogram);
            std::printf("mean score over %d episodes: %.2f\n", episodes,
                        glimpse::mean_score(res.scores));
            std::printf("histogram: %s\n", hist_out.c_str());
        } else if (render->parsed()) {
            const glimpse::RunConfig cfg = config_or_default(config_path);
            const std::uint32_t s =
                seed >= 0 ? static_cast<std::uint32_t>(seed) : 1u;
            const int n = glimpse::render_sequence(checkpoint_path, cfg.env, s,
                                                   stride, window, out_dir);
            std::printf("wrote %d frames to %s\n", n, out_dir.c_str());
        } else if (app.got_subcommand("gradcheck")) {
            const double worst = glimpse::grad_check_suite(1, 10);
            std::printf("max relative gradient error: %.3e\n", worst);
            return worst <= 1e-4 ? 0 : 1;
        } else if (app.got_subcommand("sanity")) {
            glimpse::EnvConfig env;
            const double mean = glimpse::run_sanity(env, 20, 1);
            std::printf("tracker policy mean score over 20 episodes: %.2f\n",
                        mean);
            return mean >= 15.0 ? 0 : 1;
        } else if (app.got_subcommand("baseline")) {
            glimpse::EnvConfig env;
            const double mean = glimpse::run_random_baseline(env, 20, 1);
            std::printf("random policy mean score over 20 episodes: %.2f\n",
                        mean);
            return mean <= -18.0 ? 0 : 1;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
