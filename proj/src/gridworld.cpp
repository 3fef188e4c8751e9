#include "drrl/tabular_envs.hpp"

#include "drrl/errors.hpp"
#include "drrl/rng.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <string>

namespace drrl {

TabularRMDP make_gridworld(const GridworldSpec& spec) {
    const int W = spec.width, Hg = spec.height;
    if (W <= 0 || Hg <= 0) throw ValidationError("grid dimensions must be positive");
    if (spec.horizon <= 0) throw ValidationError("horizon must be positive");
    if (!(spec.hazard_prob >= 0.0 && spec.hazard_prob <= 1.0))
        throw ValidationError("hazard_prob must lie in [0, 1]");
    if (spec.fail_cells.empty()) throw ValidationError("at least one fail cell is required");
    const int S = W * Hg;
    std::vector<char> fail(static_cast<std::size_t>(S), 0);
    for (int c : spec.fail_cells) {
        if (c < 0 || c >= S) throw ValidationError("fail cell " + std::to_string(c) + " outside the grid");
        fail[static_cast<std::size_t>(c)] = 1;
    }
    if (std::all_of(fail.begin(), fail.end(), [](char f) { return f != 0; }))
        throw ValidationError("every cell is a fail cell");

    auto is_fail = [&](int c) { return fail[static_cast<std::size_t>(c)] != 0; };
    auto neighbour = [&](int c, int action) {
        int x = c % W, y = c / W;
        switch (action) {
        case kUp: --y; break;
        case kDown: ++y; break;
        case kLeft: --x; break;
        case kRight: ++x; break;
        default: break;
        }
        if (x < 0 || x >= W || y < 0 || y >= Hg) return -1;
        return y * W + x;
    };

    // Manhattan distance to the nearest fail cell
    std::vector<int> dist(static_cast<std::size_t>(S), INT_MAX);
    int max_dist = 1;
    for (int c = 0; c < S; ++c) {
        for (int f : spec.fail_cells) {
            const int d = std::abs(c % W - f % W) + std::abs(c / W - f / W);
            dist[static_cast<std::size_t>(c)] = std::min(dist[static_cast<std::size_t>(c)], d);
        }
        if (!is_fail(c)) max_dist = std::max(max_dist, dist[static_cast<std::size_t>(c)]);
    }

    Rng rng(spec.seed, "gridworld");
    std::vector<double> slip(static_cast<std::size_t>(S));
    for (auto& p : slip) p = 0.2 * rng.uniform();

    const int A = kGridActions, H = spec.horizon;
    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
    TransitionKernel kernel(S, A, H);
    for (int c = 0; c < S; ++c) {
        std::vector<int> fail_nbrs, safe_nbrs;
        for (int dir = kUp; dir <= kRight; ++dir) {
            const int n = neighbour(c, dir);
            if (n < 0) continue;
            (is_fail(n) ? fail_nbrs : safe_nbrs).push_back(n);
        }
        for (int a = 0; a < A; ++a) {
            std::vector<double> row(static_cast<std::size_t>(S), 0.0);
            if (is_fail(c)) {
                row[static_cast<std::size_t>(c)] = 1.0;
            } else {
                const double hazard = fail_nbrs.empty() ? 0.0 : spec.hazard_prob;
                for (int f : fail_nbrs)
                    row[static_cast<std::size_t>(f)] += hazard / static_cast<double>(fail_nbrs.size());
                int target = neighbour(c, a);
                if (target < 0 || is_fail(target)) target = c;
                const double p_slip = safe_nbrs.empty() ? 0.0 : slip[static_cast<std::size_t>(c)];
                row[static_cast<std::size_t>(target)] += (1.0 - hazard) * (1.0 - p_slip);
                for (int n : safe_nbrs)
                    row[static_cast<std::size_t>(n)] +=
                        (1.0 - hazard) * p_slip / static_cast<double>(safe_nbrs.size());
            }
            const double r = is_fail(c) ? 0.0
                                        : static_cast<double>(dist[static_cast<std::size_t>(c)]) /
                                              static_cast<double>(max_dist);
            for (int h = 0; h < H; ++h) {
                std::copy(row.begin(), row.end(), kernel.row(h, c, a).begin());
                rewards[(static_cast<std::size_t>(h) * S + c) * A + a] = r;
            }
        }
    }
    int start = 0;
    while (is_fail(start)) ++start;
    return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel), spec.fail_cells, start);
}

TabularRMDP make_fail_chain(int horizon) {
    if (horizon <= 0) throw ValidationError("horizon must be positive");
    const int S = 2, A = 1, H = horizon;
    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
    TransitionKernel kernel(S, A, H);
    for (int h = 0; h < H; ++h) {
        rewards[static_cast<std::size_t>(h) * S * A] = 1.0;
        kernel.row(h, 0, 0)[0] = 1.0;
        kernel.row(h, 1, 0)[1] = 1.0;
    }
    return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel), {1}, 0);
}

TabularRMDP make_risky_chain(int horizon, double safe_reward, double risky_reward, double hazard) {
    if (horizon <= 0) throw ValidationError("horizon must be positive");
    if (!(hazard >= 0.0 && hazard <= 1.0)) throw ValidationError("hazard must lie in [0, 1]");
    const int S = 2, A = 2, H = horizon;
    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
    TransitionKernel kernel(S, A, H);
    for (int h = 0; h < H; ++h) {
        rewards[static_cast<std::size_t>(h) * S * A + 0] = safe_reward;
        rewards[static_cast<std::size_t>(h) * S * A + 1] = risky_reward;
        kernel.row(h, 0, 0)[0] = 1.0;
        kernel.row(h, 0, 1)[0] = 1.0 - hazard;
        kernel.row(h, 0, 1)[1] = hazard;
        kernel.row(h, 1, 0)[1] = 1.0;
        kernel.row(h, 1, 1)[1] = 1.0;
    }
    return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel), {1}, 0);
}

TabularRMDP make_random_rmdp(int num_states, int num_actions, int horizon, int num_fail,
                             std::uint64_t seed) {
    if (num_states <= 0 || num_actions <= 0 || horizon <= 0)
        throw ValidationError("S, A, H must be positive");
    if (num_fail < 0 || num_fail >= num_states)
        throw ValidationError("num_fail must lie in [0, S)");
    const int S = num_states, A = num_actions, H = horizon;
    const int first_fail = S - num_fail;
    Rng rng(seed, "random_rmdp");
    std::vector<double> rewards(static_cast<std::size_t>(H) * S * A, 0.0);
    TransitionKernel kernel(S, A, H);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                auto row = kernel.row(h, s, a);
                if (s >= first_fail) {
                    const auto w = rng.simplex(static_cast<std::size_t>(num_fail));
                    for (int k = 0; k < num_fail; ++k)
                        row[static_cast<std::size_t>(first_fail + k)] = w[static_cast<std::size_t>(k)];
                } else {
                    const auto w = rng.simplex(static_cast<std::size_t>(S));
                    std::copy(w.begin(), w.end(), row.begin());
                    rewards[(static_cast<std::size_t>(h) * S + s) * A + a] = rng.uniform();
                }
            }
    std::vector<int> fails;
    for (int s = first_fail; s < S; ++s) fails.push_back(s);
    return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel), std::move(fails), 0);
}

} // namespace drrl
