#include "drrl/cartpole.hpp"

#include "drrl/errors.hpp"

#include <cmath>
#include <numbers>

namespace drrl {

void CartPolePhysics::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(gravity) || !positive(masscart) || !positive(masspole) || !positive(half_length) ||
        !positive(dt) || !positive(theta_threshold_deg) || !positive(x_threshold))
        throw ValidationError("cartpole physics constants must be positive and finite");
    if (!(std::isfinite(force_mag) && force_mag >= 0.0)) throw ValidationError("force_mag must be >= 0");
    if (max_steps <= 0) throw ValidationError("max_steps must be positive");
}

CartPoleTransition cartpole_step(const CartPoleState& s, int action, const CartPoleScales& scales,
                                 const CartPolePhysics& p) {
    if (action != 0 && action != 1) throw DomainError("cartpole action must be 0 or 1");
    if (!std::isfinite(s.x) || !std::isfinite(s.x_dot) || !std::isfinite(s.theta) || !std::isfinite(s.theta_dot))
        throw NumericFault("non-finite cartpole state");

    const double length = p.half_length * scales.pole_length_scale;
    const double force_mag = p.force_mag * scales.force_scale;
    const double force = action == 1 ? force_mag : -force_mag;
    const double total_mass = p.masspole + p.masscart;
    const double polemass_length = p.masspole * length;
    const double costheta = std::cos(s.theta);
    const double sintheta = std::sin(s.theta);

    const double temp = (force + polemass_length * s.theta_dot * s.theta_dot * sintheta) / total_mass;
    const double thetaacc = (p.gravity * sintheta - costheta * temp) /
                            (length * (4.0 / 3.0 - p.masspole * costheta * costheta / total_mass));
    const double xacc = temp - polemass_length * thetaacc * costheta / total_mass;

    CartPoleTransition out;
    out.state.x = s.x + p.dt * s.x_dot;
    out.state.x_dot = s.x_dot + p.dt * xacc;
    out.state.theta = s.theta + p.dt * s.theta_dot;
    out.state.theta_dot = s.theta_dot + p.dt * thetaacc;
    const auto& n = out.state;
    if (!std::isfinite(n.x) || !std::isfinite(n.x_dot) || !std::isfinite(n.theta) || !std::isfinite(n.theta_dot))
        throw NumericFault("cartpole step produced a non-finite state");

    const double theta_limit = p.theta_threshold_deg * 2.0 * std::numbers::pi / 360.0;
    out.done = n.x < -p.x_threshold || n.x > p.x_threshold || n.theta < -theta_limit || n.theta > theta_limit;
    out.reward = 1.0;
    return out;
}

std::string to_string(PerturbationKind kind) {
    switch (kind) {
    case PerturbationKind::none: return "none";
    case PerturbationKind::action_noise: return "action_noise";
    case PerturbationKind::force_scale: return "force_scale";
    case PerturbationKind::pole_length_scale: return "pole_length_scale";
    }
    return "none";
}

PerturbationKind perturbation_kind_from_string(const std::string& name) {
    if (name == "none") return PerturbationKind::none;
    if (name == "action_noise") return PerturbationKind::action_noise;
    if (name == "force_scale") return PerturbationKind::force_scale;
    if (name == "pole_length_scale") return PerturbationKind::pole_length_scale;
    throw ValidationError("unknown perturbation kind '" + name + "'");
}

void PerturbationSpec::validate() const {
    switch (kind) {
    case PerturbationKind::none: break;
    case PerturbationKind::action_noise:
        if (!(level >= 0.0 && level <= 1.0)) throw ValidationError("action noise level must lie in [0, 1]");
        break;
    case PerturbationKind::force_scale:
        if (!(std::isfinite(level) && level >= 0.0)) throw ValidationError("force scale must be >= 0");
        break;
    case PerturbationKind::pole_length_scale:
        if (!(std::isfinite(level) && level > 0.0)) throw ValidationError("pole length scale must be > 0");
        break;
    }
}

int apply_action_noise(int action, double rho, Rng& rng, int num_actions) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
    if (rho == 0.0) return action;
    // two draws per call regardless of outcome keep the stream aligned across rho values
    const bool replace = rng.uniform() < rho;
    const int random_action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_actions)));
    return replace ? random_action : action;
}

std::map<std::string, std::vector<double>> perturbation_grids() {
    return {
        {"action_noise", {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
        {"force_scale", {0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0}},
        {"pole_length_scale", {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}},
    };
}

CartPoleEnv::CartPoleEnv(CartPolePhysics physics, PerturbationSpec perturbation)
    : physics_(physics), perturbation_(perturbation) {
    physics_.validate();
    perturbation_.validate();
    if (perturbation_.kind == PerturbationKind::force_scale) scales_.force_scale = perturbation_.level;
    if (perturbation_.kind == PerturbationKind::pole_length_scale) scales_.pole_length_scale = perturbation_.level;
}

std::vector<double> CartPoleEnv::reset(std::uint64_t seed) {
    Rng init(seed, "cartpole_reset");
    state_.x = init.uniform(-0.05, 0.05);
    state_.x_dot = init.uniform(-0.05, 0.05);
    state_.theta = init.uniform(-0.05, 0.05);
    state_.theta_dot = init.uniform(-0.05, 0.05);
    noise_rng_ = Rng(seed, "action_noise");
    steps_ = 0;
    last_action_ = -1;
    ended_ = false;
    return state_.as_vector();
}

StepResult CartPoleEnv::step(int action) {
    if (ended_) throw DomainError("step called after the episode ended; call reset first");
    int executed = action;
    if (perturbation_.kind == PerturbationKind::action_noise)
        executed = apply_action_noise(action, perturbation_.level, noise_rng_, 2);
    const auto tr = cartpole_step(state_, executed, scales_, physics_);
    state_ = tr.state;
    last_action_ = executed;
    ++steps_;
    StepResult out;
    out.reward = tr.reward;
    out.obs = state_.as_vector();
    out.done = tr.done;
    out.truncated = !tr.done && steps_ >= physics_.max_steps;
    ended_ = out.done || out.truncated;
    return out;
}

TabularEnv::TabularEnv(const TabularRMDP& rmdp, std::optional<TransitionKernel> kernel)
    : rmdp_(rmdp), kernel_(std::move(kernel)) {
    if (kernel_ && (kernel_->num_states() != rmdp.num_states() || kernel_->num_actions() != rmdp.num_actions() ||
                    kernel_->horizon() != rmdp.horizon()))
        throw DimensionError("kernel shape does not match the model");
}

std::vector<double> TabularEnv::reset(std::uint64_t seed) {
    rng_ = Rng(seed, "tabular_env");
    state_ = rmdp_.initial_state();
    h_ = 0;
    ended_ = false;
    return {0.0, static_cast<double>(state_)};
}

StepResult TabularEnv::step(int action) {
    if (ended_) throw DomainError("step called after the episode ended; call reset first");
    if (action < 0 || action >= rmdp_.num_actions()) throw DomainError("action out of range");
    const auto row = kernel_ ? kernel_->row(h_, state_, action) : rmdp_.kernel_row(h_, state_, action);
    StepResult out;
    out.reward = rmdp_.reward(h_, state_, action);
    state_ = static_cast<int>(rng_.categorical(std::vector<double>(row.begin(), row.end())));
    ++h_;
    out.obs = {static_cast<double>(h_), static_cast<double>(state_)};
    out.truncated = h_ >= rmdp_.horizon();
    ended_ = out.truncated;
    return out;
}

} // namespace drrl
