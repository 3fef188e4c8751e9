#pragma once

#include "drrl/robust_core.hpp"

#include <cstdint>
#include <vector>

namespace drrl {

struct GridworldSpec {
    int width = 3;
    int height = 3;
    std::vector<int> fail_cells; ///< row-major cell indices y * width + x
    double hazard_prob = 0.1;
    int horizon = 5;
    std::uint64_t seed = 0;
};

/// Gridworld actions. Moves off the grid or into a fail cell leave the agent in place.
enum GridAction : int { kStay = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };
inline constexpr int kGridActions = 5;

/**
 * Gridworld with absorbing zero-reward fail cells.
 *
 * A non-fail cell pays dist / max_dist, where dist is its Manhattan distance
 * to the nearest fail cell. From a cell bordering a fail cell the agent falls
 * in with probability hazard_prob (uniform over the bordering fail cells).
 * Otherwise the intended move happens, except that with a per-cell slip
 * probability drawn from the seed in [0, 0.2] it goes to a uniformly chosen
 * non-fail neighbour instead. The initial state is the first non-fail cell.
 */
TabularRMDP make_gridworld(const GridworldSpec& spec);

/// Two states {0: good, 1: fail}, one action, r(good) = 1, good stays good.
TabularRMDP make_fail_chain(int horizon);

/**
 * Two states {0: good, 1: fail} and two actions at the good state:
 * action 0 pays safe_reward and stays; action 1 pays risky_reward and falls
 * into the fail state with probability hazard.
 */
TabularRMDP make_risky_chain(int horizon, double safe_reward = 0.5, double risky_reward = 1.0,
                             double hazard = 0.2);

/// Random dense model: Dirichlet(1) rows, U[0,1] rewards, the last num_fail states absorbing.
TabularRMDP make_random_rmdp(int num_states, int num_actions, int horizon, int num_fail,
                             std::uint64_t seed);

} // namespace drrl
