#ifndef GLIMPSE_PONG_HPP
#define GLIMPSE_PONG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "glimpse/tensor.hpp"

namespace glimpse {

enum class GameAction : int { NoOp = 0, Up = 1, Down = 2 };

struct RawFrame {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // row-major, intensities in [0,1]
};

struct EnvConfig {
    int field_width = 160;
    int field_height = 168;
    int paddle_height = 24;
    int paddle_width = 4;
    int paddle_speed = 4;
    double ball_speed_x = 2.0;
    double ball_speed_y_max = 4.0;
    int opponent_speed = 2;
    int opponent_deadzone = 6;
    int points_to_win = 21;
    int action_repeat = 4;
    int max_steps = 10000;

    static constexpr int kBallSize = 2;
    static constexpr int kPaddleInset = 16;  // x distance of paddle from its wall

    void validate() const {
        if (field_width <= 0 || field_height <= 0 || paddle_height <= 0 ||
            paddle_width <= 0 || paddle_speed <= 0)
            throw ConfigError("env: dimensions and speeds must be positive");
        if (ball_speed_x <= 0 || ball_speed_y_max <= 0)
            throw ConfigError("env: ball speeds must be positive");
        if (points_to_win < 1) throw ConfigError("env: points_to_win must be >= 1");
        if (action_repeat < 1) throw ConfigError("env: action_repeat must be >= 1");
        if (max_steps < 1) throw ConfigError("env: max_steps must be >= 1");
        if (opponent_speed < 0 || opponent_deadzone < 0)
            throw ConfigError("env: opponent parameters must be non-negative");
        if (static_cast<double>(opponent_speed) >= ball_speed_y_max)
            throw ConfigError("env: opponent_speed must be < ball_speed_y_max");
        if (paddle_height >= field_height || paddle_width * 2 + 2 * kPaddleInset >= field_width)
            throw ConfigError("env: paddles do not fit the field");
    }

    int agent_paddle_x() const { return field_width - kPaddleInset - paddle_width; }
    int opponent_paddle_x() const { return kPaddleInset; }
};

struct EnvState {
    double ball_x = 0, ball_y = 0;    // top-left corner of the ball
    double ball_vx = 0, ball_vy = 0;  // pixels per tick
    int agent_paddle_y = 0;     // top edge
    int opponent_paddle_y = 0;
    int agent_score = 0;
    int opponent_score = 0;
    int step_count = 0;
    bool serve_pending = false;
    int serve_dir = 0;       // -1 toward opponent, +1 toward agent
    int serve_vy_sign = 1;   // alternates between serves
    bool done = false;
    Rng rng;

    bool operator==(const EnvState& o) const {
        return ball_x == o.ball_x && ball_y == o.ball_y && ball_vx == o.ball_vx &&
               ball_vy == o.ball_vy && agent_paddle_y == o.agent_paddle_y &&
               opponent_paddle_y == o.opponent_paddle_y &&
               agent_score == o.agent_score && opponent_score == o.opponent_score &&
               step_count == o.step_count && serve_pending == o.serve_pending &&
               serve_dir == o.serve_dir && done == o.done && rng == o.rng;
    }
};

struct StepResult {
    RawFrame frame;
    int reward = 0;  // -1, 0, +1
    bool done = false;
    int agent_score = 0;
    int opponent_score = 0;
};

inline RawFrame render(const EnvConfig& cfg, const EnvState& st) {
    RawFrame f;
    f.width = cfg.field_width;
    f.height = cfg.field_height;
    f.pixels.assign(static_cast<std::size_t>(f.width) * f.height, 0.0f);
    auto rect = [&](int x0, int y0, int w, int h) {
        for (int y = y0; y < y0 + h; ++y) {
            if (y < 0 || y >= f.height) continue;
            for (int x = x0; x < x0 + w; ++x) {
                if (x < 0 || x >= f.width) continue;
                f.pixels[static_cast<std::size_t>(y) * f.width + x] = 1.0f;
            }
        }
    };
    rect(cfg.opponent_paddle_x(), st.opponent_paddle_y, cfg.paddle_width,
         cfg.paddle_height);
    rect(cfg.agent_paddle_x(), st.agent_paddle_y, cfg.paddle_width,
         cfg.paddle_height);
    if (!st.serve_pending)
        rect(static_cast<int>(st.ball_x), static_cast<int>(st.ball_y),
             EnvConfig::kBallSize, EnvConfig::kBallSize);
    return f;
}

namespace detail {

inline void place_serve(const EnvConfig& cfg, EnvState& st) {
    st.ball_x = (cfg.field_width - EnvConfig::kBallSize) / 2.0;
    st.ball_y = (cfg.field_height - EnvConfig::kBallSize) / 2.0;
    st.ball_vx = cfg.ball_speed_x * st.serve_dir;
    const double mag = rand_range(st.rng, 0.5, cfg.ball_speed_y_max / 2.0);
    st.ball_vy = mag * st.serve_vy_sign;
    st.serve_vy_sign = -st.serve_vy_sign;
    st.serve_pending = false;
}

}  // namespace detail

/// Displacement the scripted opponent applies this tick: pursuit of the
/// ball's y position, capped at opponent_speed, frozen inside the deadzone.
inline int opponent_policy(const EnvConfig& cfg, const EnvState& st) {
    const double ball_c = st.ball_y + EnvConfig::kBallSize / 2.0;
    const double pad_c = st.opponent_paddle_y + cfg.paddle_height / 2.0;
    const double diff = ball_c - pad_c;
    if (std::abs(diff) <= cfg.opponent_deadzone) return 0;
    const int want = static_cast<int>(std::lround(diff));
    return std::clamp(want, -cfg.opponent_speed, cfg.opponent_speed);
}

inline std::pair<EnvState, RawFrame> reset(const EnvConfig& cfg,
                                           std::uint32_t seed) {
    cfg.validate();
    EnvState st;
    st.rng.seed(seed);
    st.agent_paddle_y = (cfg.field_height - cfg.paddle_height) / 2;
    st.opponent_paddle_y = st.agent_paddle_y;
    st.serve_dir = rand_bernoulli(st.rng, 0.5) ? 1 : -1;
    st.serve_vy_sign = rand_bernoulli(st.rng, 0.5) ? 1 : -1;
    detail::place_serve(cfg, st);
    return {st, render(cfg, st)};
}

namespace detail {

/// One physics tick. Returns +1 / -1 / 0 for a point scored by the
/// agent / opponent / nobody.
inline int tick(const EnvConfig& cfg, EnvState& st, GameAction action) {
    const int pad_max = cfg.field_height - cfg.paddle_height;
    if (action == GameAction::Up)
        st.agent_paddle_y = std::max(0, st.agent_paddle_y - cfg.paddle_speed);
    else if (action == GameAction::Down)
        st.agent_paddle_y = std::min(pad_max, st.agent_paddle_y + cfg.paddle_speed);

    st.opponent_paddle_y =
        std::clamp(st.opponent_paddle_y + opponent_policy(cfg, st), 0, pad_max);

    if (st.serve_pending) {
        place_serve(cfg, st);
        return 0;
    }

    const double prev_x = st.ball_x;
    st.ball_x += st.ball_vx;
    st.ball_y += st.ball_vy;

    // wall bounce
    const double y_max = cfg.field_height - EnvConfig::kBallSize;
    if (st.ball_y < 0) {
        st.ball_y = -st.ball_y;
        st.ball_vy = -st.ball_vy;
    } else if (st.ball_y > y_max) {
        st.ball_y = 2 * y_max - st.ball_y;
        st.ball_vy = -st.ball_vy;
    }

    auto deflect = [&](int paddle_y) {
        const double ball_c = st.ball_y + EnvConfig::kBallSize / 2.0;
        const double pad_c = paddle_y + cfg.paddle_height / 2.0;
        const double off = (ball_c - pad_c) / (cfg.paddle_height / 2.0);
        st.ball_vy = std::clamp(cfg.ball_speed_y_max * off, -cfg.ball_speed_y_max,
                                cfg.ball_speed_y_max);
    };
    auto overlaps = [&](int paddle_y) {
        return st.ball_y + EnvConfig::kBallSize > paddle_y &&
               st.ball_y < paddle_y + cfg.paddle_height;
    };

    // agent paddle (right side), ball moving right
    const double agent_face = cfg.agent_paddle_x() - EnvConfig::kBallSize;
    if (st.ball_vx > 0 && prev_x <= agent_face && st.ball_x >= agent_face &&
        overlaps(st.agent_paddle_y)) {
        st.ball_x = 2 * agent_face - st.ball_x;
        st.ball_vx = -st.ball_vx;
        deflect(st.agent_paddle_y);
    }
    // opponent paddle (left side), ball moving left
    const double opp_face = cfg.opponent_paddle_x() + cfg.paddle_width;
    if (st.ball_vx < 0 && prev_x >= opp_face && st.ball_x <= opp_face &&
        overlaps(st.opponent_paddle_y)) {
        st.ball_x = 2 * opp_face - st.ball_x;
        st.ball_vx = -st.ball_vx;
        deflect(st.opponent_paddle_y);
    }

    // goal lines
    if (st.ball_x + EnvConfig::kBallSize < 0) {
        st.agent_score += 1;
        st.serve_pending = true;
        st.serve_dir = -1;  // serve toward the side that conceded
        return 1;
    }
    if (st.ball_x > cfg.field_width) {
        st.opponent_score += 1;
        st.serve_pending = true;
        st.serve_dir = 1;
        return -1;
    }
    return 0;
}

}  // namespace detail

inline StepResult step(const EnvConfig& cfg, EnvState& st, GameAction action) {
    if (st.done) throw UsageError("step: episode already terminated");
    int reward = 0;
    for (int t = 0; t < cfg.action_repeat; ++t) {
        reward = detail::tick(cfg, st, action);
        if (reward != 0) break;  // a step ends at the first point event
    }
    st.step_count += 1;
    st.done = st.agent_score >= cfg.points_to_win ||
              st.opponent_score >= cfg.points_to_win ||
              st.step_count >= cfg.max_steps;
    StepResult res;
    res.frame = render(cfg, st);
    res.reward = reward;
    res.done = st.done;
    res.agent_score = st.agent_score;
    res.opponent_score = st.opponent_score;
    return res;
}

/// Hand-coded reference policy: chase the ball with the agent paddle.
inline GameAction tracker_policy(const EnvConfig& cfg, const EnvState& st) {
    const double ball_c = st.ball_y + EnvConfig::kBallSize / 2.0;
    const double pad_c = st.agent_paddle_y + cfg.paddle_height / 2.0;
    if (ball_c < pad_c - 5) return GameAction::Up;
    if (ball_c > pad_c + 5) return GameAction::Down;
    return GameAction::NoOp;
}

}  // namespace glimpse

#endif
