#pragma once

#include "drrl/rng.hpp"
#include "drrl/robust_core.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace drrl {

struct StepResult {
    double reward = 0.0;
    std::vector<double> obs;
    bool done = false;      ///< terminal state reached
    bool truncated = false; ///< time limit reached without termination
};

/// Episodic interaction. Trajectories are a pure function of (reset seed, actions).
class EpisodicEnv {
public:
    virtual ~EpisodicEnv() = default;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    /// Throws DomainError once the episode has ended.
    virtual StepResult step(int action) = 0;
    virtual int num_actions() const = 0;
    virtual int obs_dim() const = 0;
    virtual int horizon() const = 0;
};

struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;

    std::vector<double> as_vector() const { return {x, x_dot, theta, theta_dot}; }
    bool operator==(const CartPoleState&) const = default;
};

/// Classic-control constants.
struct CartPolePhysics {
    double gravity = 9.8;
    double masscart = 1.0;
    double masspole = 0.1;
    double half_length = 0.5;
    double force_mag = 10.0;
    double dt = 0.02;
    double theta_threshold_deg = 12.0;
    double x_threshold = 2.4;
    int max_steps = 500;

    void validate() const;
};

struct CartPoleScales {
    double force_scale = 1.0;
    double pole_length_scale = 1.0;
};

struct CartPoleTransition {
    double reward = 0.0;
    CartPoleState state;
    bool done = false;
};

/// One Euler step. Action 1 pushes right, 0 pushes left. Throws NumericFault on non-finite state.
CartPoleTransition cartpole_step(const CartPoleState& state, int action, const CartPoleScales& scales,
                                 const CartPolePhysics& physics = {});

enum class PerturbationKind { none, action_noise, force_scale, pole_length_scale };

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& name);

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::none;
    double level = 0.0;

    void validate() const;
    static PerturbationSpec nominal() { return {}; }
};

/// With probability rho, a uniform action from {0..num_actions-1}; otherwise the input.
int apply_action_noise(int action, double rho, Rng& rng, int num_actions = 2);

/// Evaluation grids keyed by "action_noise", "force_scale", "pole_length_scale".
std::map<std::string, std::vector<double>> perturbation_grids();

class CartPoleEnv final : public EpisodicEnv {
public:
    explicit CartPoleEnv(CartPolePhysics physics = {}, PerturbationSpec perturbation = {});

    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    int num_actions() const override { return 2; }
    int obs_dim() const override { return 4; }
    int horizon() const override { return physics_.max_steps; }

    const CartPoleState& state() const noexcept { return state_; }
    /// Action actually applied on the last step (differs from the request under action noise).
    int last_executed_action() const noexcept { return last_action_; }

private:
    CartPolePhysics physics_;
    PerturbationSpec perturbation_;
    CartPoleScales scales_;
    CartPoleState state_;
    Rng noise_rng_;
    int steps_ = 0;
    int last_action_ = -1;
    bool ended_ = true;
};

/// Samples trajectories of a tabular model; the observation is {h, s}.
class TabularEnv final : public EpisodicEnv {
public:
    /// kernel defaults to the nominal kernel of the model.
    explicit TabularEnv(const TabularRMDP& rmdp, std::optional<TransitionKernel> kernel = std::nullopt);

    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    int num_actions() const override { return rmdp_.num_actions(); }
    int obs_dim() const override { return 2; }
    int horizon() const override { return rmdp_.horizon(); }

    int current_state() const noexcept { return state_; }
    int current_step() const noexcept { return h_; }

private:
    const TabularRMDP& rmdp_;
    std::optional<TransitionKernel> kernel_;
    Rng rng_;
    int state_ = 0;
    int h_ = 0;
    bool ended_ = true;
};

} // namespace drrl
