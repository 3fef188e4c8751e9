#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drrl {

// Steps are 0-based throughout: h = 0 is the first decision step and
// h = H - 1 the last. Value tables for step H (after the horizon) are zero.

/// Total-variation radius. Radii above 1 act exactly like 1.
class UncertaintyRadius {
public:
    explicit UncertaintyRadius(double sigma);

    double value() const noexcept { return sigma_; }
    /// Radius clipped to [0, 1]; TV distance never exceeds 1.
    double effective() const noexcept { return sigma_ < 1.0 ? sigma_ : 1.0; }
    bool is_zero() const noexcept { return sigma_ == 0.0; }

private:
    double sigma_;
};

/// Dense state-action table for a single step.
class SaTable {
public:
    SaTable() = default;
    SaTable(int num_states, int num_actions, double fill = 0.0);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(int s, int a) { return data_[index(s, a)]; }
    double operator()(int s, int a) const { return data_[index(s, a)]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double max_over_actions(int s) const;
    /// Greedy action; ties go to the smallest index.
    int argmax_action(int s) const;
    /// V(s) = max_a table(s, a) for every state.
    std::vector<double> state_values() const;

    double min_entry() const;
    double max_entry() const;

    friend bool operator==(const SaTable&, const SaTable&) = default;

private:
    std::size_t index(int s, int a) const {
        return static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions_) +
               static_cast<std::size_t>(a);
    }

    int num_states_ = 0;
    int num_actions_ = 0;
    std::vector<double> data_;
};

/// Candidate robust Q-function for one step; entries in [0, H].
class ValueTable : public SaTable {
public:
    using SaTable::SaTable;
};

/// Candidate dual function g(s, a) for one step; entries in [0, 2H/sigma].
class DualTable : public SaTable {
public:
    using SaTable::SaTable;
};

/// Per-step transition kernel P_h(s' | s, a), stored densely as [h][s][a][s'].
class TransitionKernel {
public:
    TransitionKernel() = default;
    TransitionKernel(int num_states, int num_actions, int horizon);
    TransitionKernel(int num_states, int num_actions, int horizon, std::vector<double> probs);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int horizon() const noexcept { return horizon_; }

    std::span<const double> row(int h, int s, int a) const;
    std::span<double> row(int h, int s, int a);
    const std::vector<double>& raw() const noexcept { return probs_; }

    /// Largest |sum(row) - 1| over all rows.
    double max_row_defect() const;

    friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

private:
    std::size_t offset(int h, int s, int a) const;

    int num_states_ = 0;
    int num_actions_ = 0;
    int horizon_ = 0;
    std::vector<double> probs_;
};

/// Worst-case kernel of a fixed policy; each row lies in the TV ball of the nominal row.
using WorstCaseKernel = TransitionKernel;

/**
 * Finite-horizon nominal model with a designated set of absorbing failure states.
 *
 * Construction validates: stochastic rows (1e-12), rewards in [0, 1], and for
 * every fail state zero reward with no transition mass leaving the fail set.
 */
class TabularRMDP {
public:
    TabularRMDP(int num_states, int num_actions, int horizon, std::vector<double> rewards,
                TransitionKernel kernel, std::vector<int> fail_states, int initial_state);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int horizon() const noexcept { return horizon_; }
    int initial_state() const noexcept { return initial_state_; }

    double reward(int h, int s, int a) const;
    std::span<const double> kernel_row(int h, int s, int a) const { return kernel_.row(h, s, a); }
    const TransitionKernel& kernel() const noexcept { return kernel_; }
    const std::vector<double>& rewards() const noexcept { return rewards_; }
    const std::vector<int>& fail_states() const noexcept { return fail_states_; }
    bool is_fail(int s) const;

    friend bool operator==(const TabularRMDP&, const TabularRMDP&) = default;

private:
    void validate() const;

    int num_states_;
    int num_actions_;
    int horizon_;
    std::vector<double> rewards_; // [h][s][a]
    TransitionKernel kernel_;
    std::vector<int> fail_states_;
    int initial_state_;
};

/// Deterministic Markov policy pi_h(s).
class DeterministicPolicy {
public:
    DeterministicPolicy() = default;
    DeterministicPolicy(int horizon, int num_states, int fill_action = 0);
    DeterministicPolicy(int horizon, int num_states, std::vector<int> actions);

    int horizon() const noexcept { return horizon_; }
    int num_states() const noexcept { return num_states_; }
    int operator()(int h, int s) const { return actions_[offset(h, s)]; }
    int& operator()(int h, int s) { return actions_[offset(h, s)]; }
    const std::vector<int>& actions() const noexcept { return actions_; }

    friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;

private:
    std::size_t offset(int h, int s) const {
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(num_states_) +
               static_cast<std::size_t>(s);
    }

    int horizon_ = 0;
    int num_states_ = 0;
    std::vector<int> actions_;
};

/// One observed transition (s_h, a_h, r_h, s_{h+1}).
struct TransitionSample {
    int h = 0;
    int s = 0;
    int a = 0;
    double r = 0.0;
    int next_state = 0;
};

// ---------------------------------------------------------------------------
// Scalar TV machinery
// ---------------------------------------------------------------------------

/// Dual objective (1 - sigma) eta - E_p[(eta - V)_+] at a given eta.
double tv_dual_objective(std::span<const double> probs, std::span<const double> values,
                         UncertaintyRadius sigma, double eta);

/**
 * sup over eta of (1 - sigma) eta - E_p[(eta - V)_+], evaluated exactly.
 *
 * The objective is concave and piecewise linear with breakpoints at the
 * values, so the supremum sits at the smallest value whose cumulative
 * probability reaches 1 - sigma. Equals the TV-ball infimum of E_P[V] once a
 * zero-value outcome is reachable; at sigma = 0 it is the plain mean.
 */
double tv_dual_value(std::span<const double> probs, std::span<const double> values,
                     UncertaintyRadius sigma);

/// Smallest maximizer eta* of the dual objective (0 for sigma >= 1).
double tv_dual_argmin(std::span<const double> probs, std::span<const double> values,
                      UncertaintyRadius sigma);

struct WorstCaseRow {
    double value = 0.0;
    std::vector<double> distribution;
};

/**
 * Exact inf of E_P[V] over {P in simplex : TV(P, probs) <= sigma}.
 *
 * Greedy transport: mass is taken from the highest-valued outcomes first and
 * deposited on the smallest-index minimum-value outcome. Only outcomes whose
 * value exceeds the minimum give up mass.
 */
WorstCaseRow tv_inf_expectation_ball(std::span<const double> probs, std::span<const double> values,
                                     UncertaintyRadius sigma);

/// Plain expectation sum_i p_i v_i in index order.
double expectation(std::span<const double> probs, std::span<const double> values);

// ---------------------------------------------------------------------------
// Robust dynamic programming
// ---------------------------------------------------------------------------

/// r_h(s,a) + inf_{P in U(s,a)} E_P[max_a' f_next(., a')]. f_next is the step h+1 table.
ValueTable robust_bellman_backup(const TabularRMDP& rmdp, const ValueTable& f_next,
                                 UncertaintyRadius sigma, int h);

/// Same backup from a state-value vector V_{h+1}.
ValueTable robust_backup_from_values(const TabularRMDP& rmdp, std::span<const double> next_values,
                                     UncertaintyRadius sigma, int h);

struct PlanningResult {
    std::vector<ValueTable> q;            ///< q[h], h = 0..H-1
    std::vector<std::vector<double>> v;   ///< v[h], h = 0..H, v[H] = 0
    DeterministicPolicy policy;
};

/// Exact robust finite-horizon dynamic program.
PlanningResult robust_backward_induction(const TabularRMDP& rmdp, UncertaintyRadius sigma);

/// Standard (non-robust) backward induction under the nominal kernel.
PlanningResult backward_induction(const TabularRMDP& rmdp);

struct PolicyValues {
    std::vector<ValueTable> q;
    std::vector<std::vector<double>> v; ///< v[H] = 0
};

/// Robust evaluation of a fixed deterministic policy.
PolicyValues robust_policy_evaluation(const TabularRMDP& rmdp, const DeterministicPolicy& pi,
                                      UncertaintyRadius sigma);

/// Non-robust evaluation of pi under an arbitrary kernel with the model's rewards.
PolicyValues policy_evaluation_under(const TabularRMDP& rmdp, const TransitionKernel& kernel,
                                     const DeterministicPolicy& pi);

// ---------------------------------------------------------------------------
// Dual-based empirical operators
// ---------------------------------------------------------------------------

struct LossValue {
    double value = 0.0;
    bool empty_data = false; ///< set when the dataset was empty (value is 0)
};

/// sum over samples of (g(s,a) - max_a' f_next(s',a'))_+ - (1 - sigma) g(s,a).
LossValue empirical_dual_loss(const DualTable& g, const ValueTable& f_next,
                              std::span<const TransitionSample> data, UncertaintyRadius sigma);

/**
 * Dual-form backup under the nominal kernel:
 * r(s,a) - [E_{P*}[(g(s,a) - max_a' f_next(s',a'))_+] - (1 - sigma) g(s,a)].
 *
 * At sigma = 0 this returns the standard backup regardless of g.
 */
ValueTable empirical_robust_backup_g(const TabularRMDP& rmdp, const ValueTable& f_next,
                                     const DualTable& g, UncertaintyRadius sigma, int h);

struct EmpiricalBackup {
    ValueTable values;       ///< sample mean of the dual-form target per (s,a); 0 where unseen
    std::vector<int> counts; ///< samples per (s,a), row-major
};

/// Same operator with the expectation replaced by a sample average.
EmpiricalBackup empirical_robust_backup_g(std::span<const TransitionSample> data, int num_states,
                                          int num_actions, const ValueTable& f_next,
                                          const DualTable& g, UncertaintyRadius sigma);

/// Per-row exact dual maximizer against max_a' f_next, as a DualTable.
DualTable exact_dual_table(const TabularRMDP& rmdp, const ValueTable& f_next,
                           UncertaintyRadius sigma, int h);

} // namespace drrl
