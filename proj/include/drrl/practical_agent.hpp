#pragma once

#include "drrl/cartpole.hpp"
#include "drrl/neural.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace drrl {

struct AgentConfig {
    double gamma = 0.99;
    double tau = 0.005;
    std::size_t buffer_capacity = 200000;
    std::size_t batch_size = 256;
    double lr_q = 3e-4;
    double lr_g = 3e-4;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int epsilon_decay_episodes = 200;
    int episodes = 500;
    int updates_per_step = 1;
    double sigma = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    int hidden_q = 128;
    int hidden_g = 128;
    double g_max = 10.0;
    bool use_dual = true;    ///< false: plain Double-Q targets with no dual network update
    bool dual_target = false; ///< use a soft-updated copy of g inside the TD target

    void validate() const;
};

/// (g - v_next)_+ - (1 - sigma) g.
double dual_term(double g_value, double v_next, double sigma);

/// mean over the batch of max(|dual| - beta, 0)^2.
double dual_loss_with_slack(std::span<const double> dual_terms, double beta);

/// r + (1 - done) gamma (v_next + dual_new).
double td_target(double r, bool done, double gamma, double v_next, double dual_new);

/// Linear decay over `decay_episodes` starting at episode 1, then held at the end value.
double epsilon_for_episode(int episode, const AgentConfig& config);

struct AgentNetworks {
    Mlp q1, q2, q1_target, q2_target, g, g_target;
};

AgentNetworks make_networks(const AgentConfig& config, int obs_dim, int num_actions);

/// argmax_a min(Q1, Q2)(s, a), ties to the smallest action.
int greedy_action(const AgentNetworks& nets, const std::vector<double>& obs);

/// Uniform with probability epsilon (one draw for the coin, one for the action), else greedy.
int select_action(const AgentNetworks& nets, const std::vector<double>& obs, double epsilon, Rng& rng);

struct AgentOptimizers {
    Adam q1, q2, g;
};

AgentOptimizers make_optimizers(const AgentNetworks& nets, const AgentConfig& config);

struct UpdateStats {
    double loss_q = 0.0;
    double loss_g = 0.0;
};

/// One dual step, one step on each Q network, then soft target updates.
UpdateStats update_step(AgentNetworks& nets, AgentOptimizers& opt, const ReplayBatch& batch,
                        const AgentConfig& config);

struct CurveRow {
    int episode = 0;
    double ret = 0.0;
    double epsilon = 0.0;
    double loss_q = 0.0; ///< mean over the episode's updates (0 without updates)
    double loss_g = 0.0;
};

struct TrainResult {
    AgentNetworks nets;
    std::vector<CurveRow> curve;
    std::uint64_t env_steps = 0;
    std::uint64_t gradient_steps = 0;
};

/// Trains on the nominal environment built from `physics`.
TrainResult train(const AgentConfig& config, const CartPolePhysics& physics = {});

/// Seed of evaluation episode `episode` for training seed `seed`; disjoint from training streams.
std::uint64_t eval_episode_seed(std::uint64_t seed, int episode);

/// Greedy returns under a perturbation.
std::vector<double> evaluate_returns(const AgentNetworks& nets, const PerturbationSpec& perturbation, int episodes,
                                     std::uint64_t seed, const CartPolePhysics& physics = {});

struct EvalRecord {
    std::string kind;
    double level = 0.0;
    double sigma = 0.0;
    double beta = 0.0;
    std::string seed; ///< a seed number, or "pooled"
    std::vector<double> returns;
    double mean_return = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_episodes = 0;
};

EvalRecord make_eval_record(const PerturbationSpec& p, double sigma, double beta, std::string seed,
                            std::vector<double> returns);

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& curve);
void write_eval_header(std::ostream& out);
void write_eval_row(std::ostream& out, const EvalRecord& r);

void save_networks(std::ostream& out, const AgentNetworks& nets);
AgentNetworks load_networks(std::istream& in);

} // namespace drrl
