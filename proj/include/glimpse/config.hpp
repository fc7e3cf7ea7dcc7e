#ifndef GLIMPSE_CONFIG_HPP
#define GLIMPSE_CONFIG_HPP

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "glimpse/pong.hpp"
#include "glimpse/trainer.hpp"

namespace glimpse {

/// Run configuration: every module config in one place. File grammar is
/// plain "section.key = value" lines; '#' starts a comment; unknown keys
/// are rejected.
struct RunConfig {
    EnvConfig env;
    AgentConfig agent;
    CurriculumConfig curriculum;
    TrainConfig train;

    void validate() const {
        env.validate();
        agent.validate();
        curriculum.validate();
        train.validate();
    }
};

namespace detail {

struct ConfigField {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    std::istringstream is(v);
    double d;
    is >> d;
    if (!is || !is.eof())
        throw ConfigError("config: bad numeric value for " + key + ": " + v);
    return static_cast<T>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": " + v);
}

inline const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields = [] {
        std::vector<ConfigField> f;
        auto num = [&f](const std::string& key, auto getter) {
            using Member = std::remove_reference_t<decltype(getter(
                std::declval<RunConfig&>()))>;
            f.push_back(
                {key,
                 [key, getter](RunConfig& c, const std::string& v) {
                     getter(c) = parse_num<Member>(key, v);
                 },
                 [getter](const RunConfig& c) {
                     return fmt_num(static_cast<double>(
                         getter(const_cast<RunConfig&>(c))));
                 }});
        };
        auto boolean = [&f](const std::string& key, auto getter) {
            f.push_back({key,
                         [key, getter](RunConfig& c, const std::string& v) {
                             getter(c) = parse_bool(key, v);
                         },
                         [getter](const RunConfig& c) {
                             return getter(const_cast<RunConfig&>(c)) ? "true"
                                                                      : "false";
                         }});
        };

        num("env.field_width", [](RunConfig& c) -> int& { return c.env.field_width; });
        num("env.field_height", [](RunConfig& c) -> int& { return c.env.field_height; });
        num("env.paddle_height", [](RunConfig& c) -> int& { return c.env.paddle_height; });
        num("env.paddle_width", [](RunConfig& c) -> int& { return c.env.paddle_width; });
        num("env.paddle_speed", [](RunConfig& c) -> int& { return c.env.paddle_speed; });
        num("env.ball_speed_x", [](RunConfig& c) -> double& { return c.env.ball_speed_x; });
        num("env.ball_speed_y_max", [](RunConfig& c) -> double& { return c.env.ball_speed_y_max; });
        num("env.opponent_speed", [](RunConfig& c) -> int& { return c.env.opponent_speed; });
        num("env.opponent_deadzone", [](RunConfig& c) -> int& { return c.env.opponent_deadzone; });
        num("env.points_to_win", [](RunConfig& c) -> int& { return c.env.points_to_win; });
        num("env.action_repeat", [](RunConfig& c) -> int& { return c.env.action_repeat; });
        num("env.max_steps", [](RunConfig& c) -> int& { return c.env.max_steps; });

        num("agent.gamma", [](RunConfig& c) -> double& { return c.agent.gamma; });
        num("agent.epsilon_start", [](RunConfig& c) -> double& { return c.agent.epsilon_start; });
        num("agent.epsilon_end", [](RunConfig& c) -> double& { return c.agent.epsilon_end; });
        num("agent.epsilon_decay_steps", [](RunConfig& c) -> std::int64_t& { return c.agent.epsilon_decay_steps; });
        num("agent.learning_rate", [](RunConfig& c) -> double& { return c.agent.learning_rate; });
        num("agent.batch_size", [](RunConfig& c) -> int& { return c.agent.batch_size; });
        num("agent.target_sync_period", [](RunConfig& c) -> int& { return c.agent.target_sync_period; });
        num("agent.learn_start", [](RunConfig& c) -> int& { return c.agent.learn_start; });
        num("agent.learn_every", [](RunConfig& c) -> int& { return c.agent.learn_every; });
        num("agent.replay_capacity", [](RunConfig& c) -> std::size_t& { return c.agent.replay_capacity; });

        boolean("curriculum.enabled", [](RunConfig& c) -> bool& { return c.curriculum.enabled; });
        f.push_back({"curriculum.trigger",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "episode_count")
                             c.curriculum.trigger = CurriculumTrigger::EpisodeCount;
                         else if (v == "score_threshold")
                             c.curriculum.trigger = CurriculumTrigger::ScoreThreshold;
                         else
                             throw ConfigError(
                                 "config: curriculum.trigger must be "
                                 "episode_count or score_threshold, got " + v);
                     },
                     [](const RunConfig& c) {
                         return c.curriculum.trigger == CurriculumTrigger::EpisodeCount
                                    ? "episode_count"
                                    : "score_threshold";
                     }});
        num("curriculum.episodes", [](RunConfig& c) -> int& { return c.curriculum.episodes; });
        num("curriculum.threshold", [](RunConfig& c) -> double& { return c.curriculum.threshold; });
        num("curriculum.window", [](RunConfig& c) -> int& { return c.curriculum.window; });

        num("train.total_episodes", [](RunConfig& c) -> int& { return c.train.total_episodes; });
        f.push_back({"train.mask_family",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "horizontal")
                             c.train.mask_family = MaskFamily::Horizontal;
                         else if (v == "vertical")
                             c.train.mask_family = MaskFamily::Vertical;
                         else
                             throw ConfigError(
                                 "config: train.mask_family must be horizontal "
                                 "or vertical, got " + v);
                     },
                     [](const RunConfig& c) {
                         return c.train.mask_family == MaskFamily::Horizontal
                                    ? "horizontal"
                                    : "vertical";
                     }});
        f.push_back({"train.combine_mode",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "flatten_sum")
                             c.train.combine_mode = CombineMode::FlattenSum;
                         else if (v == "independent_branch")
                             c.train.combine_mode = CombineMode::IndependentBranch;
                         else
                             throw ConfigError(
                                 "config: train.combine_mode must be flatten_sum "
                                 "or independent_branch, got " + v);
                     },
                     [](const RunConfig& c) {
                         return c.train.combine_mode == CombineMode::FlattenSum
                                    ? "flatten_sum"
                                    : "independent_branch";
                     }});
        num("train.eval_every", [](RunConfig& c) -> int& { return c.train.eval_every; });
        num("train.eval_episodes", [](RunConfig& c) -> int& { return c.train.eval_episodes; });
        num("train.eval_epsilon", [](RunConfig& c) -> double& { return c.train.eval_epsilon; });
        num("train.seed", [](RunConfig& c) -> std::uint32_t& { return c.train.seed; });
        num("train.checkpoint_every", [](RunConfig& c) -> int& { return c.train.checkpoint_every; });
        boolean("train.log_wall_time", [](RunConfig& c) -> bool& { return c.train.log_wall_time; });
        return f;
    }();
    return fields;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& field : detail::config_fields()) {
            if (field.key == key) {
                try {
                    field.set(cfg, value);
                } catch (const ConfigError& e) {
                    throw ConfigError("config: line " + std::to_string(lineno) +
                                      ": " + e.what());
                }
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": unknown key: " + key);
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("config: cannot open: " + path);
    return parse_config(is);
}

/// Canonical form: every key, fixed order. parse(serialize(x)) == x.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& field : detail::config_fields())
        os << field.key << " = " << field.get(cfg) << "\n";
    return os.str();
}

}  // namespace glimpse

#endif
