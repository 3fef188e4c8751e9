#pragma once

#include "drrl/linear_rmdp.hpp"
#include "drrl/robust_core.hpp"

#include <cstdint>
#include <json.hpp>
#include <vector>

namespace drrl {

/// Per-step state-action visitation d_h(s,a), h = 0..H-1.
class OccupancyMeasure {
public:
    OccupancyMeasure(int horizon, int num_states, int num_actions);

    int horizon() const noexcept { return horizon_; }
    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }

    double operator()(int h, int s, int a) const { return d_[offset(h, s, a)]; }
    double& operator()(int h, int s, int a) { return d_[offset(h, s, a)]; }
    double step_mass(int h) const;

private:
    std::size_t offset(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * num_states_ + static_cast<std::size_t>(s)) * num_actions_ +
               static_cast<std::size_t>(a);
    }

    int horizon_, num_states_, num_actions_;
    std::vector<double> d_;
};

/// Greedy minimizing kernel against the policy's own robust values V^{pi,sigma}_{h+1}.
WorstCaseKernel worst_kernel_for_policy(const TabularRMDP& rmdp, const DeterministicPolicy& pi,
                                        UncertaintyRadius sigma);

/// Forward recursion from the point mass on (initial_state, pi_0(initial_state)).
OccupancyMeasure occupancy_under(const TransitionKernel& kernel, const DeterministicPolicy& pi,
                                 int initial_state);

inline OccupancyMeasure occupancy_under(const TabularRMDP& rmdp, const DeterministicPolicy& pi) {
    return occupancy_under(rmdp.kernel(), pi, rmdp.initial_state());
}

inline constexpr double kDefaultPolicyBudget = 1e6;

/// Number of deterministic Markov policies, A^(S*H), as a double (may exceed 2^64).
double policy_count(int num_states, int num_actions, int horizon);

/// Policy with lexicographic index `index`; entry (h=0, s=0) is the most significant digit.
DeterministicPolicy policy_from_index(std::uint64_t index, int num_states, int num_actions, int horizon);

struct StateActionStep {
    int h = 0;
    int s = 0;
    int a = 0;
    bool operator==(const StateActionStep&) const = default;
};

struct CoverabilityReport {
    double c_rcov = 1.0;               ///< finite part of the sup; meaningful when !infinite
    bool infinite = false;             ///< some pair is worst-case reachable but nominally unreachable
    std::vector<double> per_step;      ///< cumulative visitation C^cv_h, h = 0..H-1
    DeterministicPolicy witness_policy;
    StateActionStep witness_hsa;
    std::uint64_t policies_enumerated = 0;
};

nlohmann::json to_json(const CoverabilityReport& report);

/**
 * sup over deterministic Markov policies of max_{h,s,a} d^{pi,omega}_h(s,a) / mu^pi_h(s,a),
 * where d uses the policy's worst-case kernel and mu the nominal one.
 * 0/0 counts as 0; x/0 with x > 0 sets `infinite` and records that witness.
 * Also fills the per-step cumulative visitation. Throws BudgetExceeded above `budget` policies.
 */
CoverabilityReport robust_coverability(const TabularRMDP& rmdp, UncertaintyRadius sigma,
                                       double budget = kDefaultPolicyBudget, int jobs = 1);

/// sum_{s,a} sup_pi d^{pi,omega}_h(s,a).
double cumulative_visitation(const TabularRMDP& rmdp, UncertaintyRadius sigma, int h,
                             double budget = kDefaultPolicyBudget);

struct LinearBoundCheck {
    double c_rcov = 0.0;
    bool infinite = false;
    double bound = 0.0; ///< A * d
    bool holds = false;
};

/// Exact C_rcov of the tabularized instance against the A*d bound.
LinearBoundCheck linear_coverability_bound_check(const LinearRMDP& linear, UncertaintyRadius sigma,
                                                 double budget = kDefaultPolicyBudget);

} // namespace drrl
