#ifndef GLIMPSE_AGENT_HPP
#define GLIMPSE_AGENT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glimpse/net.hpp"
#include "glimpse/observe.hpp"
#include "glimpse/optim.hpp"

namespace glimpse {

struct QOutput {
    std::array<float, 3> game{};  // NoOp, Up, Down
    std::array<float, 3> mask{};  // family_masks order
};

/// (game action, mask choice) fused into the 9-way flat action space.
struct CombinedAction {
    int game = 0;        // GameAction index
    int mask_index = 0;  // 0..2 into the active family

    int flat() const { return 3 * game + mask_index; }
    static CombinedAction from_flat(int f) { return {f / 3, f % 3}; }
    GameAction game_action() const { return static_cast<GameAction>(game); }
};

enum class CombineMode : int { FlattenSum = 0, IndependentBranch = 1 };

/// q9[3g + m] = q_game[g] + q_mask[m]
inline std::array<float, 9> combined_q(const QOutput& out) {
    std::array<float, 9> q9{};
    for (int g = 0; g < 3; ++g)
        for (int m = 0; m < 3; ++m) q9[3 * g + m] = out.game[g] + out.mask[m];
    return q9;
}

template <typename It>
int argmax_lowest(It begin, It end) {
    int best = 0, i = 0;
    auto bv = *begin;
    for (It it = begin; it != end; ++it, ++i) {
        if (*it > bv) {
            bv = *it;
            best = i;
        }
    }
    return best;
}

/// Epsilon-greedy over the 9 combined actions. Greedy choice under
/// FlattenSum is the argmax of q9; under IndependentBranch the pair of
/// per-branch argmaxes. Ties break toward the lowest index.
inline CombinedAction select_action(const QOutput& out, double epsilon, Rng& rng,
                                    CombineMode mode) {
    if (epsilon < 0 || epsilon > 1)
        throw UsageError("select_action: epsilon out of [0,1]");
    if (epsilon > 0 && rand_bernoulli(rng, epsilon))
        return CombinedAction::from_flat(static_cast<int>(rand_index(rng, 9)));
    if (mode == CombineMode::FlattenSum) {
        const auto q9 = combined_q(out);
        return CombinedAction::from_flat(argmax_lowest(q9.begin(), q9.end()));
    }
    return {argmax_lowest(out.game.begin(), out.game.end()),
            argmax_lowest(out.mask.begin(), out.mask.end())};
}

// --- network: shared convolutional backbone + two 3-way heads ---

template <typename T>
class BranchingQNet {
public:
    Sequential<T> backbone;
    Sequential<T> head_game;
    Sequential<T> head_mask;

    BranchingQNet()
        : backbone(DataShape::volume(kStackFrames, kObsSize, kObsSize),
                   {LayerSpec::conv(32, 8, 4), LayerSpec::relu(),
                    LayerSpec::conv(64, 4, 2), LayerSpec::relu()}),
          head_game(backbone.output_shape(), head_specs()),
          head_mask(backbone.output_shape(), head_specs()) {}

    static std::vector<LayerSpec> head_specs() {
        return {LayerSpec::conv(64, 3, 1), LayerSpec::relu(),
                LayerSpec::flatten(), LayerSpec::dense(256), LayerSpec::relu(),
                LayerSpec::dense(3)};
    }

    void init(std::uint32_t seed) {
        backbone.init(seed);
        head_game.init(seed + 1);
        head_mask.init(seed + 2);
    }

    struct Cache {
        typename Sequential<T>::Cache bb, hg, hm;
    };

    QOutput forward(const std::vector<T>& input, Cache& cache) const {
        backbone.forward(input, cache.bb);
        head_game.forward(cache.bb.out, cache.hg);
        head_mask.forward(cache.bb.out, cache.hm);
        QOutput q;
        for (int i = 0; i < 3; ++i) {
            q.game[i] = static_cast<float>(cache.hg.out[i]);
            q.mask[i] = static_cast<float>(cache.hm.out[i]);
            if (!std::isfinite(q.game[i]) || !std::isfinite(q.mask[i]))
                throw NumericError("q_forward: non-finite Q value");
        }
        return q;
    }

    struct Grads {
        std::vector<TensorT<T>> bb, hg, hm;

        static Grads shaped_like(const BranchingQNet& net) {
            return {zeros_like(net.backbone.params()),
                    zeros_like(net.head_game.params()),
                    zeros_like(net.head_mask.params())};
        }
        void zero() {
            for (auto* part : {&bb, &hg, &hm})
                for (auto& t : *part) t.fill(T{0});
        }
    };

    /// Backprop from per-head output gradients; both heads feed the
    /// shared backbone. Accumulates into `grads`.
    void backward(const std::vector<T>& d_game, const std::vector<T>& d_mask,
                  const Cache& cache, Grads& grads) const {
        std::vector<T> d_feat_g, d_feat_m;
        head_game.backward(d_game, cache.hg, grads.hg, d_feat_g);
        head_mask.backward(d_mask, cache.hm, grads.hm, d_feat_m);
        for (std::size_t i = 0; i < d_feat_g.size(); ++i) d_feat_g[i] += d_feat_m[i];
        std::vector<T> d_in;
        backbone.backward(d_feat_g, cache.bb, grads.bb, d_in, false);
    }

    void visit_params(const std::function<void(const std::string&, TensorT<T>&)>& fn) {
        auto walk = [&](const char* prefix, std::vector<TensorT<T>>& ps) {
            for (std::size_t i = 0; i < ps.size(); ++i)
                fn(std::string(prefix) + "." + std::to_string(i), ps[i]);
        };
        walk("backbone", backbone.params());
        walk("head_game", head_game.params());
        walk("head_mask", head_mask.params());
    }
};

using QNet = BranchingQNet<float>;

inline QOutput q_forward(const QNet& net, const ObsStack& obs) {
    std::vector<float> input;
    obs.to_input(input);
    QNet::Cache cache;
    return net.forward(input, cache);
}

/// Target network sync: a deep copy of the online parameters.
inline QNet sync_target(const QNet& net) { return net; }

// --- replay memory ---

struct Transition {
    ObsStack obs;
    CombinedAction action;
    float reward = 0;
    ObsStack next_obs;
    bool done = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 100000) : capacity_(capacity) {
        if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    void store(Transition t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(t));
        } else {
            storage_[head_] = std::move(t);
        }
        head_ = (head_ + 1) % capacity_;
    }

    const Transition& at(std::size_t logical) const {
        // logical 0 = oldest
        if (storage_.size() < capacity_) return storage_[logical];
        return storage_[(head_ + logical) % capacity_];
    }

    /// Uniform with replacement.
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const {
        if (storage_.size() < batch)
            throw UsageError("sample: buffer smaller than batch");
        std::vector<const Transition*> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i)
            out.push_back(&storage_[rand_index(rng, storage_.size())]);
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> storage_;
};

// --- agent configuration ---

struct AgentConfig {
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    std::int64_t epsilon_decay_steps = 100000;
    double learning_rate = 1e-4;
    int batch_size = 32;
    int target_sync_period = 1000;
    int learn_start = 5000;
    int learn_every = 4;
    std::size_t replay_capacity = 100000;

    void validate() const {
        if (gamma < 0 || gamma > 1) throw ConfigError("agent.gamma out of [0,1]");
        if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 ||
            epsilon_end > 1)
            throw ConfigError("agent.epsilon out of [0,1]");
        if (epsilon_decay_steps < 1 || batch_size < 1 || target_sync_period < 1 ||
            learn_start < 1 || learn_every < 1 || replay_capacity < 1)
            throw ConfigError("agent: counts must be positive");
    }

    double epsilon_at(std::int64_t step) const {
        if (step >= epsilon_decay_steps) return epsilon_end;
        const double frac = static_cast<double>(step) / epsilon_decay_steps;
        return epsilon_start + (epsilon_end - epsilon_start) * frac;
    }
};

// --- TD targets and the learning update ---

struct BranchTargets {
    // FlattenSum: y is the single target against q9[flat]. IndependentBranch:
    // y_game / y_mask per branch.
    float y = 0, y_game = 0, y_mask = 0;
};

inline BranchTargets td_target(const Transition& t, const QOutput& next_q,
                               double gamma, CombineMode mode) {
    BranchTargets out;
    const float bootstrap = t.done ? 0.0f : 1.0f;
    const float max_g = *std::max_element(next_q.game.begin(), next_q.game.end());
    const float max_m = *std::max_element(next_q.mask.begin(), next_q.mask.end());
    if (mode == CombineMode::FlattenSum) {
        out.y = t.reward + bootstrap * static_cast<float>(gamma) * (max_g + max_m);
    } else {
        out.y_game = t.reward + bootstrap * static_cast<float>(gamma) * max_g;
        out.y_mask = t.reward + bootstrap * static_cast<float>(gamma) * max_m;
    }
    return out;
}

/// Adam moments for the three parameter groups, advanced in lockstep.
struct AgentOptimizer {
    AdamState<float> bb, hg, hm;

    static AgentOptimizer shaped_like(const QNet& net) {
        return {AdamState<float>::shaped_like(net.backbone.params()),
                AdamState<float>::shaped_like(net.head_game.params()),
                AdamState<float>::shaped_like(net.head_mask.params())};
    }
    std::uint64_t timestep() const { return bb.timestep; }
};

/// One DQN update on a sampled batch: Huber loss of predictions against
/// TD targets, backprop through both heads and the shared backbone, one
/// Adam step. Returns the batch loss.
inline double learn_step(QNet& net, const QNet& target_net, ReplayBuffer& buffer,
                         AgentOptimizer& adam, QNet::Grads& grads,
                         const AgentConfig& cfg, CombineMode mode, Rng& rng) {
    const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
    grads.zero();
    const float inv_b = 1.0f / static_cast<float>(batch.size());
    double loss = 0.0;
    std::vector<float> input;
    QNet::Cache cache, tcache;
    for (const Transition* t : batch) {
        t->next_obs.to_input(input);
        const QOutput next_q = target_net.forward(input, tcache);
        const BranchTargets tgt = td_target(*t, next_q, cfg.gamma, mode);

        t->obs.to_input(input);
        const QOutput q = net.forward(input, cache);
        const int g = t->action.game, m = t->action.mask_index;

        std::vector<float> dg(3, 0.0f), dm(3, 0.0f);
        if (mode == CombineMode::FlattenSum) {
            const float e = q.game[g] + q.mask[m] - tgt.y;
            const float ae = std::abs(e);
            loss += ae <= 1 ? 0.5 * e * e : ae - 0.5;
            const float d = std::clamp(e, -1.0f, 1.0f) * inv_b;
            dg[g] = d;
            dm[m] = d;
        } else {
            const float eg = q.game[g] - tgt.y_game;
            const float em = q.mask[m] - tgt.y_mask;
            const float aeg = std::abs(eg), aem = std::abs(em);
            loss += 0.5 * ((aeg <= 1 ? 0.5 * eg * eg : aeg - 0.5) +
                           (aem <= 1 ? 0.5 * em * em : aem - 0.5));
            dg[g] = 0.5f * std::clamp(eg, -1.0f, 1.0f) * inv_b;
            dm[m] = 0.5f * std::clamp(em, -1.0f, 1.0f) * inv_b;
        }
        net.backward(dg, dm, cache, grads);
    }
    loss *= inv_b;
    if (!std::isfinite(loss)) throw NumericError("learn_step: non-finite loss");

    AdamConfig acfg;
    acfg.lr = cfg.learning_rate;
    adam_step(net.backbone.params(), grads.bb, adam.bb, acfg);
    adam_step(net.head_game.params(), grads.hg, adam.hg, acfg);
    adam_step(net.head_mask.params(), grads.hm, adam.hm, acfg);
    return loss;
}

}  // namespace glimpse

#endif
