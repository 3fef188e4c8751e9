#include "drrl/occupancy.hpp"

#include "drrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace drrl {

OccupancyMeasure::OccupancyMeasure(int horizon, int num_states, int num_actions)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions),
      d_(static_cast<std::size_t>(horizon) * num_states * num_actions, 0.0) {
    if (horizon <= 0 || num_states <= 0 || num_actions <= 0)
        throw DimensionError("occupancy dimensions must be positive");
}

double OccupancyMeasure::step_mass(int h) const {
    const auto begin = d_.begin() + static_cast<std::ptrdiff_t>(offset(h, 0, 0));
    return std::accumulate(begin, begin + num_states_ * num_actions_, 0.0);
}

WorstCaseKernel worst_kernel_for_policy(const TabularRMDP& rmdp, const DeterministicPolicy& pi,
                                        UncertaintyRadius sigma) {
    const auto values = robust_policy_evaluation(rmdp, pi, sigma);
    const int S = rmdp.num_states(), A = rmdp.num_actions(), H = rmdp.horizon();
    WorstCaseKernel out(S, A, H);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const auto w = tv_inf_expectation_ball(rmdp.kernel_row(h, s, a),
                                                       values.v[static_cast<std::size_t>(h + 1)], sigma);
                std::copy(w.distribution.begin(), w.distribution.end(), out.row(h, s, a).begin());
            }
    return out;
}

OccupancyMeasure occupancy_under(const TransitionKernel& kernel, const DeterministicPolicy& pi,
                                 int initial_state) {
    const int S = kernel.num_states(), A = kernel.num_actions(), H = kernel.horizon();
    if (pi.horizon() != H || pi.num_states() != S) throw DimensionError("policy shape does not match kernel");
    if (initial_state < 0 || initial_state >= S) throw DomainError("initial state out of range");
    OccupancyMeasure d(H, S, A);
    d(0, initial_state, pi(0, initial_state)) = 1.0;
    std::vector<double> next(static_cast<std::size_t>(S));
    for (int h = 0; h + 1 < H; ++h) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const double mass = d(h, s, a);
                if (mass == 0.0) continue;
                const auto row = kernel.row(h, s, a);
                for (int sp = 0; sp < S; ++sp) next[static_cast<std::size_t>(sp)] += mass * row[static_cast<std::size_t>(sp)];
            }
        for (int sp = 0; sp < S; ++sp) d(h + 1, sp, pi(h + 1, sp)) = next[static_cast<std::size_t>(sp)];
    }
    return d;
}

double policy_count(int num_states, int num_actions, int horizon) {
    return std::pow(static_cast<double>(num_actions), static_cast<double>(num_states) * horizon);
}

DeterministicPolicy policy_from_index(std::uint64_t index, int num_states, int num_actions, int horizon) {
    DeterministicPolicy pi(horizon, num_states, 0);
    const auto A = static_cast<std::uint64_t>(num_actions);
    for (int h = horizon - 1; h >= 0; --h)
        for (int s = num_states - 1; s >= 0; --s) {
            pi(h, s) = static_cast<int>(index % A);
            index /= A;
        }
    return pi;
}

namespace {

// Accumulators for one contiguous block of policy indices.
struct CoverageChunk {
    double best_finite = -1.0;
    std::uint64_t best_finite_index = 0;
    StateActionStep best_finite_hsa;
    bool infinite = false;
    std::uint64_t infinite_index = 0;
    StateActionStep infinite_hsa;
    std::vector<double> sup_d; // [h][s][a]
};

CoverageChunk scan_policies(const TabularRMDP& rmdp, UncertaintyRadius sigma, std::uint64_t begin,
                            std::uint64_t end) {
    const int S = rmdp.num_states(), A = rmdp.num_actions(), H = rmdp.horizon();
    CoverageChunk c;
    c.sup_d.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
        const auto pi = policy_from_index(idx, S, A, H);
        const auto worst = worst_kernel_for_policy(rmdp, pi, sigma);
        const auto d = occupancy_under(worst, pi, rmdp.initial_state());
        const auto mu = occupancy_under(rmdp.kernel(), pi, rmdp.initial_state());
        for (int h = 0; h < H; ++h)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    const double dv = d(h, s, a);
                    auto& sup = c.sup_d[(static_cast<std::size_t>(h) * S + s) * A + a];
                    sup = std::max(sup, dv);
                    if (dv == 0.0) continue;
                    const double mv = mu(h, s, a);
                    if (mv == 0.0) {
                        if (!c.infinite) {
                            c.infinite = true;
                            c.infinite_index = idx;
                            c.infinite_hsa = {h, s, a};
                        }
                        continue;
                    }
                    const double ratio = dv / mv;
                    if (ratio > c.best_finite) {
                        c.best_finite = ratio;
                        c.best_finite_index = idx;
                        c.best_finite_hsa = {h, s, a};
                    }
                }
    }
    return c;
}

// Chunks arrive in index order, so strict comparisons keep the smallest index on ties.
void merge_into(CoverageChunk& acc, const CoverageChunk& c) {
    if (c.best_finite > acc.best_finite) {
        acc.best_finite = c.best_finite;
        acc.best_finite_index = c.best_finite_index;
        acc.best_finite_hsa = c.best_finite_hsa;
    }
    if (c.infinite && !acc.infinite) {
        acc.infinite = true;
        acc.infinite_index = c.infinite_index;
        acc.infinite_hsa = c.infinite_hsa;
    }
    for (std::size_t i = 0; i < acc.sup_d.size(); ++i) acc.sup_d[i] = std::max(acc.sup_d[i], c.sup_d[i]);
}

std::uint64_t checked_policy_count(const TabularRMDP& rmdp, double budget) {
    const double n = policy_count(rmdp.num_states(), rmdp.num_actions(), rmdp.horizon());
    if (n > budget)
        throw BudgetExceeded("policy enumeration needs " + std::to_string(n) + " policies, budget is " +
                                 std::to_string(budget),
                             n, budget);
    return static_cast<std::uint64_t>(n);
}

CoverageChunk enumerate(const TabularRMDP& rmdp, UncertaintyRadius sigma, double budget, int jobs) {
    const std::uint64_t n = checked_policy_count(rmdp, budget);
    const auto workers = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(
        static_cast<std::uint64_t>(std::max(jobs, 1)), 1, std::max<std::uint64_t>(n / 64, 1)));
    if (workers == 1) return scan_policies(rmdp, sigma, 0, n);
    std::vector<CoverageChunk> chunks(workers);
    std::vector<std::thread> threads;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t b = n * w / workers, e = n * (w + 1) / workers;
        threads.emplace_back([&, w, b, e] { chunks[w] = scan_policies(rmdp, sigma, b, e); });
    }
    for (auto& t : threads) t.join();
    CoverageChunk acc = std::move(chunks[0]);
    for (std::uint64_t w = 1; w < workers; ++w) merge_into(acc, chunks[w]);
    return acc;
}

} // namespace

CoverabilityReport robust_coverability(const TabularRMDP& rmdp, UncertaintyRadius sigma, double budget,
                                       int jobs) {
    const auto acc = enumerate(rmdp, sigma, budget, jobs);
    const int S = rmdp.num_states(), A = rmdp.num_actions(), H = rmdp.horizon();
    CoverabilityReport r;
    r.policies_enumerated = checked_policy_count(rmdp, budget);
    r.infinite = acc.infinite;
    r.c_rcov = acc.best_finite;
    if (acc.infinite) {
        r.witness_policy = policy_from_index(acc.infinite_index, S, A, H);
        r.witness_hsa = acc.infinite_hsa;
    } else {
        r.witness_policy = policy_from_index(acc.best_finite_index, S, A, H);
        r.witness_hsa = acc.best_finite_hsa;
    }
    r.per_step.assign(static_cast<std::size_t>(H), 0.0);
    for (int h = 0; h < H; ++h) {
        const auto first = acc.sup_d.begin() + static_cast<std::ptrdiff_t>(h) * S * A;
        r.per_step[static_cast<std::size_t>(h)] = std::accumulate(first, first + S * A, 0.0);
    }
    return r;
}

double cumulative_visitation(const TabularRMDP& rmdp, UncertaintyRadius sigma, int h, double budget) {
    if (h < 0 || h >= rmdp.horizon()) throw DomainError("step out of range");
    return robust_coverability(rmdp, sigma, budget).per_step[static_cast<std::size_t>(h)];
}

nlohmann::json to_json(const CoverabilityReport& r) {
    nlohmann::json j;
    if (r.infinite)
        j["c_rcov"] = "inf";
    else
        j["c_rcov"] = r.c_rcov;
    j["c_rcov_finite_part"] = r.c_rcov;
    j["infinite"] = r.infinite;
    j["per_step"] = r.per_step;
    nlohmann::json pol = nlohmann::json::array();
    for (int h = 0; h < r.witness_policy.horizon(); ++h) {
        nlohmann::json row = nlohmann::json::array();
        for (int s = 0; s < r.witness_policy.num_states(); ++s) row.push_back(r.witness_policy(h, s));
        pol.push_back(row);
    }
    j["witness_policy"] = pol;
    j["witness_hsa"] = {r.witness_hsa.h, r.witness_hsa.s, r.witness_hsa.a};
    j["policies_enumerated"] = r.policies_enumerated;
    return j;
}

LinearBoundCheck linear_coverability_bound_check(const LinearRMDP& linear, UncertaintyRadius sigma,
                                                 double budget) {
    const auto tab = tabularize(linear);
    const auto rep = robust_coverability(tab, sigma, budget);
    LinearBoundCheck out;
    out.c_rcov = rep.infinite ? std::numeric_limits<double>::infinity() : rep.c_rcov;
    out.infinite = rep.infinite;
    out.bound = static_cast<double>(linear.num_actions()) * linear.dim();
    out.holds = !rep.infinite && rep.c_rcov <= out.bound;
    return out;
}

} // namespace drrl
