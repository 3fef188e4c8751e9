#pragma once

#include "drrl/robust_core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace drrl {

/**
 * d-rectangular linear model: P*_h(.|s,a) = sum_i phi_{h,i}(s,a) nu*_{h,i}(.)
 * and r_h(s,a) = phi_h(s,a)^T theta_h, with phi_h(s,a) on the d-simplex.
 */
class LinearRMDP {
public:
    LinearRMDP(int dim, int num_states, int num_actions, int horizon, std::vector<double> features,
               std::vector<double> base_measures, std::vector<double> theta);

    int dim() const noexcept { return dim_; }
    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int horizon() const noexcept { return horizon_; }

    std::span<const double> features(int h, int s, int a) const;
    std::span<const double> base_measure(int h, int i) const;
    std::span<const double> theta(int h) const;

private:
    void validate() const;

    int dim_, num_states_, num_actions_, horizon_;
    std::vector<double> features_;      // [h][s][a][i]
    std::vector<double> base_measures_; // [h][i][s']
    std::vector<double> theta_;         // [h][i]
};

struct LinearInstance {
    LinearRMDP linear;
    TabularRMDP tabular;
};

/// Dirichlet(1) features and base measures, theta uniform in [0,1]^d (so rewards land in [0,1]).
LinearInstance make_linear_rmdp(int dim, int num_states, int num_actions, int horizon,
                                std::uint64_t seed);

/// Exact tabular model induced by the features (no fail states, initial state 0).
TabularRMDP tabularize(const LinearRMDP& linear);

/// One-hot features (d = S*A) reproducing an arbitrary tabular model.
LinearRMDP one_hot_linear(const TabularRMDP& rmdp);

/// r_h(s,a) + sum_i phi_i(s,a) inf_{nu in TV ball of nu*_i} E_nu[V]: the d-rectangular robust backup.
ValueTable d_rectangular_backup(const LinearRMDP& linear, std::span<const double> next_values,
                                UncertaintyRadius sigma, int h);

/// Per-index TV dual maximizers eta*_{h,i} against V.
std::vector<double> d_rectangular_index_duals(const LinearRMDP& linear,
                                              std::span<const double> next_values,
                                              UncertaintyRadius sigma, int h);

/**
 * Dual function of the d-rectangular backup at every (s,a): the joint dual
 * over (eta_1..eta_d) separates across indices, and g(s,a) = sum_i phi_i(s,a) eta*_i.
 */
DualTable d_rectangular_dual_table(const LinearRMDP& linear, std::span<const double> next_values,
                                   UncertaintyRadius sigma, int h);

/// Worst-case kernel rows of the d-rectangular set against V (per-index greedy transport).
std::vector<double> d_rectangular_worst_row(const LinearRMDP& linear,
                                            std::span<const double> next_values,
                                            UncertaintyRadius sigma, int h, int s, int a);

struct FeatureFit {
    std::vector<double> weights;
    double max_residual = 0.0;
};

/// Least-squares fit of table(s,a) ~ phi_h(s,a)^T w over all (s,a).
FeatureFit fit_in_features(const LinearRMDP& linear, int h, const SaTable& table);

} // namespace drrl
