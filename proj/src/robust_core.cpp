#include "drrl/robust_core.hpp"

#include "drrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace drrl {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kProbSumTolerance = 1e-9;

void check_distribution_and_values(std::span<const double> probs, std::span<const double> values) {
    if (probs.size() != values.size())
        throw DimensionError("probs has " + std::to_string(probs.size()) + " entries, values has " +
                             std::to_string(values.size()));
    if (probs.empty()) throw DimensionError("empty distribution");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0)) throw DomainError("negative or NaN probability");
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw DomainError("values must be finite and non-negative");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > kProbSumTolerance)
        throw DomainError("probabilities sum to " + std::to_string(total));
}

// Indices sorted by ascending value, ties by index.
std::vector<std::size_t> ascending_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    return order;
}

} // namespace

UncertaintyRadius::UncertaintyRadius(double sigma) : sigma_(sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw DomainError("uncertainty radius must be finite and >= 0");
}

// ---------------------------------------------------------------------------

SaTable::SaTable(int num_states, int num_actions, double fill)
    : num_states_(num_states), num_actions_(num_actions) {
    if (num_states <= 0 || num_actions <= 0) throw DimensionError("table needs S, A > 0");
    data_.assign(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions), fill);
}

double SaTable::max_over_actions(int s) const {
    double best = (*this)(s, 0);
    for (int a = 1; a < num_actions_; ++a) best = std::max(best, (*this)(s, a));
    return best;
}

int SaTable::argmax_action(int s) const {
    int best = 0;
    for (int a = 1; a < num_actions_; ++a)
        if ((*this)(s, a) > (*this)(s, best)) best = a;
    return best;
}

std::vector<double> SaTable::state_values() const {
    std::vector<double> v(static_cast<std::size_t>(num_states_));
    for (int s = 0; s < num_states_; ++s) v[static_cast<std::size_t>(s)] = max_over_actions(s);
    return v;
}

double SaTable::min_entry() const { return *std::min_element(data_.begin(), data_.end()); }
double SaTable::max_entry() const { return *std::max_element(data_.begin(), data_.end()); }

// ---------------------------------------------------------------------------

TransitionKernel::TransitionKernel(int num_states, int num_actions, int horizon)
    : num_states_(num_states), num_actions_(num_actions), horizon_(horizon) {
    if (num_states <= 0 || num_actions <= 0 || horizon <= 0)
        throw DimensionError("kernel needs S, A, H > 0");
    probs_.assign(static_cast<std::size_t>(horizon) * num_states * num_actions * num_states, 0.0);
}

TransitionKernel::TransitionKernel(int num_states, int num_actions, int horizon,
                                   std::vector<double> probs)
    : TransitionKernel(num_states, num_actions, horizon) {
    if (probs.size() != probs_.size())
        throw DimensionError("kernel expects " + std::to_string(probs_.size()) + " entries, got " +
                             std::to_string(probs.size()));
    probs_ = std::move(probs);
}

std::size_t TransitionKernel::offset(int h, int s, int a) const {
    return ((static_cast<std::size_t>(h) * num_states_ + static_cast<std::size_t>(s)) * num_actions_ +
            static_cast<std::size_t>(a)) *
           static_cast<std::size_t>(num_states_);
}

std::span<const double> TransitionKernel::row(int h, int s, int a) const {
    return {probs_.data() + offset(h, s, a), static_cast<std::size_t>(num_states_)};
}

std::span<double> TransitionKernel::row(int h, int s, int a) {
    return {probs_.data() + offset(h, s, a), static_cast<std::size_t>(num_states_)};
}

double TransitionKernel::max_row_defect() const {
    double worst = 0.0;
    for (int h = 0; h < horizon_; ++h)
        for (int s = 0; s < num_states_; ++s)
            for (int a = 0; a < num_actions_; ++a) {
                auto r = row(h, s, a);
                worst = std::max(worst, std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0));
            }
    return worst;
}

// ---------------------------------------------------------------------------

TabularRMDP::TabularRMDP(int num_states, int num_actions, int horizon, std::vector<double> rewards,
                         TransitionKernel kernel, std::vector<int> fail_states, int initial_state)
    : num_states_(num_states), num_actions_(num_actions), horizon_(horizon),
      rewards_(std::move(rewards)), kernel_(std::move(kernel)), fail_states_(std::move(fail_states)),
      initial_state_(initial_state) {
    std::sort(fail_states_.begin(), fail_states_.end());
    fail_states_.erase(std::unique(fail_states_.begin(), fail_states_.end()), fail_states_.end());
    validate();
}

void TabularRMDP::validate() const {
    if (num_states_ <= 0 || num_actions_ <= 0 || horizon_ <= 0)
        throw ValidationError("S, A, H must be positive");
    const auto n_sa = static_cast<std::size_t>(horizon_) * num_states_ * num_actions_;
    if (rewards_.size() != n_sa)
        throw ValidationError("rewards must have H*S*A = " + std::to_string(n_sa) + " entries");
    if (kernel_.num_states() != num_states_ || kernel_.num_actions() != num_actions_ ||
        kernel_.horizon() != horizon_)
        throw ValidationError("kernel shape does not match (S, A, H)");
    if (initial_state_ < 0 || initial_state_ >= num_states_)
        throw ValidationError("initial state out of range");
    for (double r : rewards_)
        if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("rewards must lie in [0, 1]");
    for (double p : kernel_.raw())
        if (!(p >= 0.0)) throw ValidationError("negative transition probability");
    if (kernel_.max_row_defect() > kRowTolerance)
        throw ValidationError("kernel rows must sum to 1 within 1e-12");
    for (int s : fail_states_)
        if (s < 0 || s >= num_states_) throw ValidationError("fail state index out of range");
    for (int s : fail_states_)
        for (int h = 0; h < horizon_; ++h)
            for (int a = 0; a < num_actions_; ++a) {
                if (reward(h, s, a) != 0.0)
                    throw ValidationError("fail state " + std::to_string(s) + " has nonzero reward");
                auto row = kernel_.row(h, s, a);
                for (int sp = 0; sp < num_states_; ++sp)
                    if (row[static_cast<std::size_t>(sp)] != 0.0 && !is_fail(sp))
                        throw ValidationError("fail state " + std::to_string(s) +
                                              " leaks mass to a non-fail state");
            }
}

double TabularRMDP::reward(int h, int s, int a) const {
    return rewards_[(static_cast<std::size_t>(h) * num_states_ + static_cast<std::size_t>(s)) *
                        num_actions_ +
                    static_cast<std::size_t>(a)];
}

bool TabularRMDP::is_fail(int s) const {
    return std::binary_search(fail_states_.begin(), fail_states_.end(), s);
}

// ---------------------------------------------------------------------------

DeterministicPolicy::DeterministicPolicy(int horizon, int num_states, int fill_action)
    : horizon_(horizon), num_states_(num_states),
      actions_(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(num_states), fill_action) {}

DeterministicPolicy::DeterministicPolicy(int horizon, int num_states, std::vector<int> actions)
    : horizon_(horizon), num_states_(num_states), actions_(std::move(actions)) {
    if (actions_.size() != static_cast<std::size_t>(horizon) * static_cast<std::size_t>(num_states))
        throw DimensionError("policy needs H*S actions");
}

// ---------------------------------------------------------------------------

double expectation(std::span<const double> probs, std::span<const double> values) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) total += probs[i] * values[i];
    return total;
}

double tv_dual_objective(std::span<const double> probs, std::span<const double> values,
                         UncertaintyRadius sigma, double eta) {
    check_distribution_and_values(probs, values);
    double hinge = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) hinge += probs[i] * std::max(eta - values[i], 0.0);
    return (1.0 - sigma.effective()) * eta - hinge;
}

double tv_dual_argmin(std::span<const double> probs, std::span<const double> values,
                      UncertaintyRadius sigma) {
    check_distribution_and_values(probs, values);
    const double level = 1.0 - sigma.effective();
    if (level <= 0.0) return 0.0;
    const auto order = ascending_order(values);
    double cdf = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        cdf += probs[order[k]];
        // all mass at this value must be counted before testing the breakpoint
        if (k + 1 < order.size() && values[order[k + 1]] == values[order[k]]) continue;
        if (cdf >= level - 1e-14) return values[order[k]];
    }
    return values[order.back()];
}

double tv_dual_value(std::span<const double> probs, std::span<const double> values,
                     UncertaintyRadius sigma) {
    check_distribution_and_values(probs, values);
    if (sigma.is_zero()) return expectation(probs, values);
    const double eta = tv_dual_argmin(probs, values, sigma);
    return tv_dual_objective(probs, values, sigma, eta);
}

WorstCaseRow tv_inf_expectation_ball(std::span<const double> probs, std::span<const double> values,
                                     UncertaintyRadius sigma) {
    check_distribution_and_values(probs, values);
    WorstCaseRow out;
    out.distribution.assign(probs.begin(), probs.end());
    if (sigma.is_zero()) {
        out.value = expectation(probs, values);
        return out;
    }
    const auto order = ascending_order(values);
    const std::size_t sink = order.front();
    const double vmin = values[sink];

    double movable = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (values[i] > vmin) movable += probs[i];
    double budget = std::min(sigma.effective(), movable);

    auto& p = out.distribution;
    p[sink] += budget;
    for (std::size_t k = order.size(); k-- > 0 && budget > 0.0;) {
        const std::size_t i = order[k];
        if (values[i] <= vmin) break;
        const double take = std::min(budget, p[i]);
        p[i] -= take;
        budget -= take;
    }
    out.value = expectation(p, values);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_step(const TabularRMDP& rmdp, int h) {
    if (h < 0 || h >= rmdp.horizon())
        throw DomainError("step " + std::to_string(h) + " outside [0, " +
                          std::to_string(rmdp.horizon()) + ")");
}

void check_table_shape(const TabularRMDP& rmdp, const SaTable& t) {
    if (t.num_states() != rmdp.num_states() || t.num_actions() != rmdp.num_actions())
        throw DimensionError("table shape does not match the model");
}

double robust_row_value(std::span<const double> row, std::span<const double> next_values,
                        UncertaintyRadius sigma) {
    if (sigma.is_zero()) return expectation(row, next_values);
    return tv_inf_expectation_ball(row, next_values, sigma).value;
}

} // namespace

ValueTable robust_backup_from_values(const TabularRMDP& rmdp, std::span<const double> next_values,
                                     UncertaintyRadius sigma, int h) {
    check_step(rmdp, h);
    if (next_values.size() != static_cast<std::size_t>(rmdp.num_states()))
        throw DimensionError("next-step values must have S entries");
    ValueTable out(rmdp.num_states(), rmdp.num_actions());
    for (int s = 0; s < rmdp.num_states(); ++s)
        for (int a = 0; a < rmdp.num_actions(); ++a)
            out(s, a) = rmdp.reward(h, s, a) +
                        robust_row_value(rmdp.kernel_row(h, s, a), next_values, sigma);
    return out;
}

ValueTable robust_bellman_backup(const TabularRMDP& rmdp, const ValueTable& f_next,
                                 UncertaintyRadius sigma, int h) {
    check_table_shape(rmdp, f_next);
    const double H = rmdp.horizon();
    if (f_next.min_entry() < 0.0 || f_next.max_entry() > H)
        throw DomainError("f_next entries must lie in [0, H]");
    const auto v = f_next.state_values();
    return robust_backup_from_values(rmdp, v, sigma, h);
}

namespace {

PlanningResult plan(const TabularRMDP& rmdp, UncertaintyRadius sigma) {
    const int S = rmdp.num_states(), H = rmdp.horizon();
    PlanningResult out;
    out.q.resize(static_cast<std::size_t>(H));
    out.v.assign(static_cast<std::size_t>(H + 1), std::vector<double>(static_cast<std::size_t>(S), 0.0));
    out.policy = DeterministicPolicy(H, S);
    for (int h = H - 1; h >= 0; --h) {
        const auto hz = static_cast<std::size_t>(h);
        out.q[hz] = robust_backup_from_values(rmdp, out.v[hz + 1], sigma, h);
        for (int s = 0; s < S; ++s) {
            const int a = out.q[hz].argmax_action(s);
            out.policy(h, s) = a;
            out.v[hz][static_cast<std::size_t>(s)] = out.q[hz](s, a);
        }
    }
    return out;
}

} // namespace

PlanningResult robust_backward_induction(const TabularRMDP& rmdp, UncertaintyRadius sigma) {
    return plan(rmdp, sigma);
}

PlanningResult backward_induction(const TabularRMDP& rmdp) {
    const int S = rmdp.num_states(), A = rmdp.num_actions(), H = rmdp.horizon();
    PlanningResult out;
    out.q.resize(static_cast<std::size_t>(H));
    out.v.assign(static_cast<std::size_t>(H + 1), std::vector<double>(static_cast<std::size_t>(S), 0.0));
    out.policy = DeterministicPolicy(H, S);
    for (int h = H - 1; h >= 0; --h) {
        const auto hz = static_cast<std::size_t>(h);
        ValueTable q(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                q(s, a) = rmdp.reward(h, s, a) + expectation(rmdp.kernel_row(h, s, a), out.v[hz + 1]);
        for (int s = 0; s < S; ++s) {
            const int a = q.argmax_action(s);
            out.policy(h, s) = a;
            out.v[hz][static_cast<std::size_t>(s)] = q(s, a);
        }
        out.q[hz] = std::move(q);
    }
    return out;
}

PolicyValues robust_policy_evaluation(const TabularRMDP& rmdp, const DeterministicPolicy& pi,
                                      UncertaintyRadius sigma) {
    const int S = rmdp.num_states(), H = rmdp.horizon();
    if (pi.horizon() != H || pi.num_states() != S) throw DimensionError("policy shape mismatch");
    PolicyValues out;
    out.q.resize(static_cast<std::size_t>(H));
    out.v.assign(static_cast<std::size_t>(H + 1), std::vector<double>(static_cast<std::size_t>(S), 0.0));
    for (int h = H - 1; h >= 0; --h) {
        const auto hz = static_cast<std::size_t>(h);
        out.q[hz] = robust_backup_from_values(rmdp, out.v[hz + 1], sigma, h);
        for (int s = 0; s < S; ++s) out.v[hz][static_cast<std::size_t>(s)] = out.q[hz](s, pi(h, s));
    }
    return out;
}

PolicyValues policy_evaluation_under(const TabularRMDP& rmdp, const TransitionKernel& kernel,
                                     const DeterministicPolicy& pi) {
    const int S = rmdp.num_states(), A = rmdp.num_actions(), H = rmdp.horizon();
    if (kernel.num_states() != S || kernel.num_actions() != A || kernel.horizon() != H)
        throw DimensionError("kernel shape mismatch");
    PolicyValues out;
    out.q.resize(static_cast<std::size_t>(H));
    out.v.assign(static_cast<std::size_t>(H + 1), std::vector<double>(static_cast<std::size_t>(S), 0.0));
    for (int h = H - 1; h >= 0; --h) {
        const auto hz = static_cast<std::size_t>(h);
        ValueTable q(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                q(s, a) = rmdp.reward(h, s, a) + expectation(kernel.row(h, s, a), out.v[hz + 1]);
        for (int s = 0; s < S; ++s) out.v[hz][static_cast<std::size_t>(s)] = q(s, pi(h, s));
        out.q[hz] = std::move(q);
    }
    return out;
}

// ---------------------------------------------------------------------------

LossValue empirical_dual_loss(const DualTable& g, const ValueTable& f_next,
                              std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    if (data.empty()) return {0.0, true};
    const double keep = 1.0 - sigma.effective();
    double total = 0.0;
    for (const auto& x : data) {
        if (x.s < 0 || x.s >= g.num_states() || x.a < 0 || x.a >= g.num_actions() ||
            x.next_state < 0 || x.next_state >= f_next.num_states())
            throw DomainError("sample index out of range");
        const double gv = g(x.s, x.a);
        total += std::max(gv - f_next.max_over_actions(x.next_state), 0.0) - keep * gv;
    }
    return {total, false};
}

ValueTable empirical_robust_backup_g(const TabularRMDP& rmdp, const ValueTable& f_next,
                                     const DualTable& g, UncertaintyRadius sigma, int h) {
    check_step(rmdp, h);
    check_table_shape(rmdp, f_next);
    check_table_shape(rmdp, g);
    const auto v = f_next.state_values();
    const int S = rmdp.num_states(), A = rmdp.num_actions();
    ValueTable out(S, A);
    const double keep = 1.0 - sigma.effective();
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const auto row = rmdp.kernel_row(h, s, a);
            if (sigma.is_zero()) {
                out(s, a) = rmdp.reward(h, s, a) + expectation(row, v);
                continue;
            }
            const double gv = g(s, a);
            double hinge = 0.0;
            for (int sp = 0; sp < S; ++sp)
                hinge += row[static_cast<std::size_t>(sp)] * std::max(gv - v[static_cast<std::size_t>(sp)], 0.0);
            out(s, a) = rmdp.reward(h, s, a) - (hinge - keep * gv);
        }
    return out;
}

EmpiricalBackup empirical_robust_backup_g(std::span<const TransitionSample> data, int num_states,
                                          int num_actions, const ValueTable& f_next,
                                          const DualTable& g, UncertaintyRadius sigma) {
    EmpiricalBackup out{ValueTable(num_states, num_actions),
                        std::vector<int>(static_cast<std::size_t>(num_states) * num_actions, 0)};
    const double keep = 1.0 - sigma.effective();
    for (const auto& x : data) {
        if (x.s < 0 || x.s >= num_states || x.a < 0 || x.a >= num_actions || x.next_state < 0 ||
            x.next_state >= f_next.num_states())
            throw DomainError("sample index out of range");
        const double vnext = f_next.max_over_actions(x.next_state);
        double target;
        if (sigma.is_zero()) {
            target = x.r + vnext;
        } else {
            const double gv = g(x.s, x.a);
            target = x.r - (std::max(gv - vnext, 0.0) - keep * gv);
        }
        out.values(x.s, x.a) += target;
        ++out.counts[static_cast<std::size_t>(x.s) * num_actions + static_cast<std::size_t>(x.a)];
    }
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) {
            const int n = out.counts[static_cast<std::size_t>(s) * num_actions + static_cast<std::size_t>(a)];
            if (n > 0) out.values(s, a) /= n;
        }
    return out;
}

DualTable exact_dual_table(const TabularRMDP& rmdp, const ValueTable& f_next,
                           UncertaintyRadius sigma, int h) {
    check_step(rmdp, h);
    check_table_shape(rmdp, f_next);
    const auto v = f_next.state_values();
    DualTable g(rmdp.num_states(), rmdp.num_actions());
    for (int s = 0; s < rmdp.num_states(); ++s)
        for (int a = 0; a < rmdp.num_actions(); ++a)
            g(s, a) = tv_dual_argmin(rmdp.kernel_row(h, s, a), v, sigma);
    return g;
}

} // namespace drrl
