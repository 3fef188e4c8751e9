#pragma once

#include "drrl/robust_core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drrl {

/**
 * Finite per-step class of S x A tables.
 *
 * Grid form: every entry ranges over the same level list, and table index is
 * the base-|levels| number whose digits are the entries in row-major (s,a)
 * order, first entry most significant. Explicit form: an arbitrary list per step.
 */
class EnumeratedClass {
public:
    static EnumeratedClass grid(int num_states, int num_actions, int horizon, std::vector<double> levels,
                                double budget = 1e5);
    static EnumeratedClass explicit_tables(int num_states, int num_actions,
                                           std::vector<std::vector<SaTable>> tables_per_step);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int horizon() const noexcept { return horizon_; }
    bool is_grid() const noexcept { return grid_; }
    const std::vector<double>& levels() const noexcept { return levels_; }

    std::uint64_t size(int h) const;
    SaTable table(int h, std::uint64_t index) const;
    /// Grid digits (level indices) of a table, row-major over (s,a).
    std::vector<int> digits(std::uint64_t index) const;
    std::uint64_t index_of_digits(std::span<const int> digits) const;
    /// Grid index of the entrywise nearest table (ties to the lower level).
    std::uint64_t nearest_index(const SaTable& target) const;

private:
    EnumeratedClass() = default;

    int num_states_ = 0, num_actions_ = 0, horizon_ = 0;
    bool grid_ = false;
    std::vector<double> levels_;
    std::uint64_t grid_size_ = 0;
    std::vector<std::vector<SaTable>> tables_;
};

/// {0, delta, 2 delta, ...} up to `upper` (inclusive within 1e-9).
std::vector<double> grid_levels(double upper, double delta);

struct GridClasses {
    EnumeratedClass f;
    EnumeratedClass g;
};

/// F over [0, H] with step delta_f; G over [0, min(H, 2H/sigma)] with step delta_g.
GridClasses build_grid_class(const TabularRMDP& rmdp, UncertaintyRadius sigma, double delta_f, double delta_g,
                             double budget = 1e5);

struct DualErmResult {
    std::uint64_t index = 0;
    double loss = 0.0;
    bool empty_data = false;
};

/// argmin over G_h of the empirical dual loss against V = max_a f_next; smallest index on ties.
DualErmResult dual_erm(std::span<const double> next_values, const EnumeratedClass& g_class, int h,
                       std::span<const TransitionSample> data, UncertaintyRadius sigma);
DualErmResult dual_erm(const ValueTable& f_next, const EnumeratedClass& g_class, int h,
                       std::span<const TransitionSample> data, UncertaintyRadius sigma);
/// Same contract by full enumeration of G_h.
DualErmResult dual_erm_bruteforce(const ValueTable& f_next, const EnumeratedClass& g_class, int h,
                                  std::span<const TransitionSample> data, UncertaintyRadius sigma);

/// sum over samples of (f'(s,a) - r - ... )^2 with the dual-form target; empty data gives 0 and the flag.
LossValue squared_bellman_loss(const ValueTable& f_prime, std::span<const double> next_values,
                               const DualTable& g, std::span<const TransitionSample> data, UncertaintyRadius sigma);
LossValue squared_bellman_loss(const ValueTable& f_prime, const ValueTable& f_next, const DualTable& g,
                               std::span<const TransitionSample> data, UncertaintyRadius sigma);

/**
 * How the step-h condition quantifies over step-(h+1) survivors.
 *  forall:   f_h must pass against every surviving f_{h+1}.
 *  pairwise: f_h must pass against at least one surviving f_{h+1}; the set is then a
 *            set of chains, and a selected f_h is paired with a compatible f_{h+1}.
 */
enum class ConfidenceSemantics { forall, pairwise };

std::string to_string(ConfidenceSemantics s);
ConfidenceSemantics confidence_semantics_from_string(const std::string& name);

struct ConfidenceState {
    double beta = 0.0;
    std::vector<std::vector<TransitionSample>> data; ///< D_h, one sample per episode
    std::vector<std::vector<char>> alive;            ///< membership flags per step over F_h

    std::vector<std::uint64_t> survivor_counts() const;
};

ConfidenceState initial_confidence_state(const EnumeratedClass& f_class, double beta);

/// Raised when some step keeps no table; min_beta is the smallest radius that would keep one.
class EmptyConfidenceSet : public std::runtime_error {
public:
    EmptyConfidenceSet(int step, double min_beta);
    int step() const noexcept { return step_; }
    double min_beta() const noexcept { return min_beta_; }

private:
    int step_;
    double min_beta_;
};

/// Backward pass h = H-1..0 over the current data; step H is the zero table.
ConfidenceState update_confidence_set(const ConfidenceState& state, const EnumeratedClass& f_class,
                                      const EnumeratedClass& g_class, UncertaintyRadius sigma,
                                      ConfidenceSemantics semantics);

/// Reference version evaluating every (f_h, f_{h+1}, f') triple; for small classes only.
ConfidenceState update_confidence_set_bruteforce(const ConfidenceState& state, const EnumeratedClass& f_class,
                                                 const EnumeratedClass& g_class, UncertaintyRadius sigma,
                                                 ConfidenceSemantics semantics);

/// Loss gap L(f_h, f_{h+1}, g_hat) - min_{f'} L(f', f_{h+1}, g_hat) on D_h.
double loss_gap(const EnumeratedClass& f_class, const EnumeratedClass& g_class, int h, std::uint64_t f_index,
                std::span<const double> next_values, std::span<const TransitionSample> data,
                UncertaintyRadius sigma);

struct Selection {
    std::vector<std::uint64_t> f_index; ///< one per step
    double value = 0.0;                 ///< max_a f_1(s1, a)
    DeterministicPolicy policy;         ///< greedy in each selected table, smallest action on ties
};

Selection optimistic_select(const ConfidenceState& state, const EnumeratedClass& f_class,
                            const EnumeratedClass& g_class, UncertaintyRadius sigma,
                            ConfidenceSemantics semantics, int initial_state);

struct RfltvConfig {
    double sigma = 0.3;
    std::optional<double> beta;        ///< unset: min{H, 1/sigma} log(K H |F_h| |G_h| / delta)
    double delta = 0.05;
    int episodes = 200;
    double delta_f = 0.25;
    double delta_g = 0.25;
    std::uint64_t seed = 0;
    ConfidenceSemantics semantics = ConfidenceSemantics::pairwise;
    bool inflate_beta_with_slack = true;
    double class_budget = 1e5;
};

double default_beta(int horizon, UncertaintyRadius sigma, int episodes, double f_size, double g_size,
                    double delta);

struct RegretRecord {
    int k = 0;
    double v_star = 0.0;
    double v_pik = 0.0;
    double gap = 0.0;
    double cum_regret = 0.0;
    std::vector<std::uint64_t> survivors; ///< per step, before this episode's rollout
    double beta_slack = 0.0;
};

struct RegretTrace {
    double beta = 0.0;
    std::vector<RegretRecord> records;
};

/// Algorithm loop: select optimistically, roll out under the nominal kernel, append data, update.
RegretTrace run_rfltv_exact(const TabularRMDP& rmdp, const RfltvConfig& config);

void write_regret_csv(std::ostream& out, const RegretTrace& trace, int horizon);

/// Least-squares slope of log cum_regret against log k over points with positive regret (0 if none).
double regret_exponent(const RegretTrace& trace);

} // namespace drrl
