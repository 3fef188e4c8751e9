#include "drrl/selftest.hpp"

#include "drrl/cartpole.hpp"
#include "drrl/harness.hpp"
#include "drrl/linear_rmdp.hpp"
#include "drrl/neural.hpp"
#include "drrl/occupancy.hpp"
#include "drrl/practical_agent.hpp"
#include "drrl/tabular_envs.hpp"
#include "drrl/version_space.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>

namespace drrl {

namespace {

struct Check {
    std::string name;
    std::function<std::string()> run; ///< empty string on success, else a diagnostic
};

std::string dual_matches_ball() {
    Rng rng(7, "selftest_dual");
    for (int k = 0; k < 2000; ++k) {
        const int S = 1 + static_cast<int>(rng.uniform_int(20));
        const UncertaintyRadius sigma(static_cast<double>(k % 11) / 10.0);
        auto p = rng.simplex(static_cast<std::size_t>(S));
        std::vector<double> v(static_cast<std::size_t>(S));
        for (auto& x : v) x = rng.uniform(0.0, 3.0);
        const double dual = tv_dual_value(p, v, sigma);
        p.push_back(0.0);
        v.push_back(0.0);
        const double ball = tv_inf_expectation_ball(p, v, sigma).value;
        if (std::abs(dual - ball) > 1e-10) return "instance " + std::to_string(k) + " differs";
    }
    return {};
}

std::string planning_consistent() {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = make_random_rmdp(4, 2, 3, 1, seed);
        const UncertaintyRadius sigma(0.3);
        const auto plan = robust_backward_induction(m, sigma);
        for (int h = 0; h < m.horizon(); ++h)
            for (int s = 0; s < m.num_states(); ++s)
                for (int a = 0; a < m.num_actions(); ++a) {
                    const double target = m.reward(h, s, a) + tv_dual_value(m.kernel_row(h, s, a), plan.v[h + 1], sigma);
                    if (std::abs(plan.q[h](s, a) - target) > 1e-10) return "seed " + std::to_string(seed);
                }
        const auto r0 = robust_backward_induction(m, UncertaintyRadius(0.0));
        const auto nominal = backward_induction(m);
        if (r0.v != nominal.v) return "sigma = 0 differs from the nominal plan, seed " + std::to_string(seed);
    }
    return {};
}

std::string coverability_nominal() {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = make_random_rmdp(3, 2, 2, 1, seed);
        const auto rep = robust_coverability(m, UncertaintyRadius(0.0));
        if (rep.infinite || std::abs(rep.c_rcov - 1.0) > 1e-12) return "seed " + std::to_string(seed);
    }
    return {};
}

std::string cartpole_replayable() {
    CartPoleEnv a, b;
    auto oa = a.reset(11), ob = b.reset(11);
    for (int t = 0; t < 50; ++t) {
        if (oa != ob) return "trajectories diverge at step " + std::to_string(t);
        const auto sa = a.step(t % 2), sb = b.step(t % 2);
        if (sa.done != sb.done) return "termination differs";
        if (sa.done) break;
        oa = sa.obs;
        ob = sb.obs;
    }
    return {};
}

std::string linear_closure() {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto inst = make_linear_rmdp(3, 5, 2, 2, seed);
        Rng rng(seed, "selftest_linear");
        std::vector<double> v(5);
        for (auto& x : v) x = rng.uniform(0.0, 2.0);
        const UncertaintyRadius sigma(0.4);
        const auto backup = d_rectangular_backup(inst.linear, v, sigma, 0);
        const auto duals = d_rectangular_dual_table(inst.linear, v, sigma, 0);
        if (fit_in_features(inst.linear, 0, backup).max_residual > 1e-8) return "backup fit, seed " + std::to_string(seed);
        if (fit_in_features(inst.linear, 0, duals).max_residual > 1e-8) return "dual fit, seed " + std::to_string(seed);
    }
    return {};
}

std::string version_space_fast_path() {
    const auto m = make_random_rmdp(2, 1, 2, 1, 3);
    const UncertaintyRadius sigma(0.3);
    const auto classes = build_grid_class(m, sigma, 1.0, 1.0);
    Rng rng(3, "selftest_vs");
    for (auto sem : {ConfidenceSemantics::forall, ConfidenceSemantics::pairwise}) {
        auto st = initial_confidence_state(classes.f, 0.5);
        for (int k = 0; k < 6; ++k) {
            for (int h = 0; h < 2; ++h) {
                const int s = static_cast<int>(rng.uniform_int(2));
                const auto row = m.kernel_row(h, s, 0);
                const int n = static_cast<int>(rng.categorical({row.begin(), row.end()}));
                st.data[h].push_back({h, s, 0, m.reward(h, s, 0), n});
            }
            try {
                const auto fast = update_confidence_set(st, classes.f, classes.g, sigma, sem);
                const auto slow = update_confidence_set_bruteforce(st, classes.f, classes.g, sigma, sem);
                if (fast.alive != slow.alive) return "survivor sets differ (" + to_string(sem) + ")";
                st = fast;
            } catch (const EmptyConfidenceSet&) {
                break;
            }
        }
    }
    return {};
}

std::string gradients_match() {
    Rng rng(5, "selftest_grad");
    for (int draw = 0; draw < 20; ++draw) {
        Mlp net(3, 16, 16, 2, draw % 2 ? OutputHead::sigmoid_scaled(10.0) : OutputHead::linear(), rng);
        Eigen::MatrixXd x(3, 1), w(2, 1);
        for (int i = 0; i < 3; ++i) x(i, 0) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < 2; ++i) w(i, 0) = rng.uniform(-1.0, 1.0);
        MlpTape tape;
        net.forward(x, tape);
        const Eigen::VectorXd grad = net.backward(tape, w);
        const auto theta = net.params();
        const double eps = 1e-6;
        for (Eigen::Index k = 0; k < theta.size(); k += 7) {
            Mlp probe = net;
            Eigen::VectorXd t = theta;
            t[k] += eps;
            probe.set_params(t);
            const double up = (probe.forward(x).array() * w.array()).sum();
            t[k] -= 2 * eps;
            probe.set_params(t);
            const double down = (probe.forward(x).array() * w.array()).sum();
            const double fd = (up - down) / (2 * eps);
            if (std::abs(fd - grad[k]) > 1e-5 * std::max(1.0, std::abs(fd))) return "draw " + std::to_string(draw);
        }
    }
    return {};
}

std::string agent_formulas() {
    if (std::abs(dual_term(2.0, 1.0, 0.4) + 0.2) > 1e-12) return "dual_term";
    const std::vector<double> terms{1.5};
    if (std::abs(dual_loss_with_slack(terms, 0.5) - 1.0) > 1e-12) return "dual_loss_with_slack";
    if (std::abs(td_target(1.0, false, 0.99, 10.0, -0.2) - 10.702) > 1e-12) return "td_target";
    if (td_target(1.0, true, 0.99, 10.0, -0.2) != 1.0) return "terminal target";
    return {};
}

std::string hash_canonical() {
    const auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
    const auto b = nlohmann::json::parse(R"({"a":[1,2],"b":1})");
    if (harness::canonical_hash(a) != harness::canonical_hash(b)) return "key order changes the hash";
    return {};
}

} // namespace

int run_selftest(std::ostream& log) {
    const std::vector<Check> checks{
        {"robust_core: dual value equals ball infimum with sink", dual_matches_ball},
        {"robust_core: planning satisfies the dual backup", planning_consistent},
        {"occupancy: sigma = 0 gives C_rcov = 1", coverability_nominal},
        {"envs: cartpole is replayable", cartpole_replayable},
        {"envs: linear closure and dual fits", linear_closure},
        {"version_space: fast update equals brute force", version_space_fast_path},
        {"neural: backward matches finite differences", gradients_match},
        {"practical_agent: update formulas", agent_formulas},
        {"harness: canonical hash ignores key order", hash_canonical},
    };
    int failures = 0;
    for (const auto& c : checks) {
        std::string msg;
        try {
            msg = c.run();
        } catch (const std::exception& e) {
            msg = std::string("threw: ") + e.what();
        }
        if (msg.empty()) {
            log << "PASS " << c.name << '\n';
        } else {
            ++failures;
            log << "FAIL " << c.name << ": " << msg << '\n';
        }
    }
    return failures == 0 ? 0 : 1;
}

} // namespace drrl
