#include "drrl/cartpole.hpp"
#include "drrl/errors.hpp"
#include "drrl/linear_rmdp.hpp"
#include "drrl/tabular_envs.hpp"

#include "../support/cartpole_oracle.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

using namespace drrl;

TEST_CASE("gridworld") {
    SUBCASE("1x2 grid reduces to the fail chain") {
        GridworldSpec spec;
        spec.width = 2;
        spec.height = 1;
        spec.fail_cells = {1};
        spec.hazard_prob = 0.0;
        spec.horizon = 2;
        const auto g = make_gridworld(spec);
        CHECK(g.num_states() == 2);
        CHECK(g.initial_state() == 0);
        for (int a = 0; a < kGridActions; ++a) {
            CHECK(g.reward(0, 0, a) == 1.0);
            CHECK(g.kernel_row(0, 0, a)[0] == 1.0);
        }
        const auto plan = robust_backward_induction(g, UncertaintyRadius(0.3));
        CHECK(plan.v[0][0] == doctest::Approx(1.7));
    }
    SUBCASE("3x3 invariants and determinism") {
        GridworldSpec spec;
        spec.fail_cells = {4};
        spec.hazard_prob = 0.1;
        spec.seed = 3;
        const auto g = make_gridworld(spec);
        CHECK(g.kernel().max_row_defect() <= 1e-12);
        for (int a = 0; a < kGridActions; ++a) {
            CHECK(g.kernel_row(0, 4, a)[4] == 1.0);
            CHECK(g.reward(0, 4, a) == 0.0);
            // corner cells do not border the centre
            CHECK(g.kernel_row(0, 0, a)[4] == 0.0);
            CHECK(g.kernel_row(0, 1, a)[4] == doctest::Approx(0.1));
        }
        CHECK(make_gridworld(spec) == g);
        spec.seed = 4;
        CHECK_FALSE(make_gridworld(spec) == g);
    }
    SUBCASE("bad geometry") {
        GridworldSpec spec;
        spec.fail_cells = {9};
        CHECK_THROWS_AS(make_gridworld(spec), ValidationError);
        spec.fail_cells = {};
        CHECK_THROWS_AS(make_gridworld(spec), ValidationError);
        spec.fail_cells = {0, 1, 2, 3, 4, 5, 6, 7, 8};
        CHECK_THROWS_AS(make_gridworld(spec), ValidationError);
    }
}

TEST_CASE("risky chain") {
    const auto m = make_risky_chain(3);
    CHECK(m.reward(0, 0, 0) == 0.5);
    CHECK(m.reward(0, 0, 1) == 1.0);
    CHECK(m.kernel_row(0, 0, 1)[1] == doctest::Approx(0.2));
    CHECK(m.kernel_row(0, 0, 0)[0] == 1.0);
    CHECK(m.is_fail(1));
}

TEST_CASE("random rmdp determinism") {
    CHECK(make_random_rmdp(4, 3, 3, 1, 5) == make_random_rmdp(4, 3, 3, 1, 5));
    CHECK_FALSE(make_random_rmdp(4, 3, 3, 1, 5) == make_random_rmdp(4, 3, 3, 1, 6));
}

TEST_CASE("linear rmdp") {
    SUBCASE("d = 2 kernels have rank at most 2") {
        const auto inst = make_linear_rmdp(2, 4, 2, 3, 7);
        for (int h = 0; h < 3; ++h) {
            Eigen::MatrixXd rows(8, 4);
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 2; ++a)
                    for (int t = 0; t < 4; ++t) rows(s * 2 + a, t) = inst.tabular.kernel_row(h, s, a)[t];
            Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
            lu.setThreshold(1e-10);
            CHECK(lu.rank() <= 2);
        }
        CHECK(inst.tabular.kernel().max_row_defect() <= 1e-12);
    }
    SUBCASE("d = 1 shares one next-state distribution") {
        const auto inst = make_linear_rmdp(1, 3, 2, 2, 1);
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a)
                for (int t = 0; t < 3; ++t)
                    CHECK(inst.tabular.kernel_row(0, s, a)[t] == doctest::Approx(inst.tabular.kernel_row(0, 0, 0)[t]));
    }
    SUBCASE("one-hot features reproduce a tabular model") {
        const auto m = make_random_rmdp(3, 2, 2, 0, 12);
        const auto lin = one_hot_linear(m);
        CHECK(lin.dim() == 6);
        const auto back = tabularize(lin);
        for (int h = 0; h < 2; ++h)
            for (int s = 0; s < 3; ++s)
                for (int a = 0; a < 2; ++a) {
                    CHECK(back.reward(h, s, a) == doctest::Approx(m.reward(h, s, a)).epsilon(1e-14));
                    for (int t = 0; t < 3; ++t)
                        CHECK(back.kernel_row(h, s, a)[t] == doctest::Approx(m.kernel_row(h, s, a)[t]).epsilon(1e-14));
                }
        // with one-hot features the d-rectangular backup is the (s,a)-rectangular one
        const std::vector<double> v{0.3, 1.4, 0.9};
        const auto a = d_rectangular_backup(lin, v, UncertaintyRadius(0.25), 0);
        const auto b = robust_backup_from_values(m, v, UncertaintyRadius(0.25), 0);
        for (int s = 0; s < 3; ++s)
            for (int x = 0; x < 2; ++x) CHECK(a(s, x) == doctest::Approx(b(s, x)).epsilon(1e-12));
    }
}

TEST_CASE("cartpole matches the reference equations") {
    CartPoleEnv env;
    auto obs = env.reset(42);
    oracle::PoleState ref{obs[0], obs[1], obs[2], obs[3]};
    for (int t = 0; t < 500; ++t) {
        const int a = t % 2;
        const auto step = env.step(a);
        ref = oracle::cartpole_reference_step(ref, a);
        REQUIRE(std::abs(step.obs[0] - ref.x) <= 1e-9);
        REQUIRE(std::abs(step.obs[1] - ref.x_dot) <= 1e-9);
        REQUIRE(std::abs(step.obs[2] - ref.theta) <= 1e-9);
        REQUIRE(std::abs(step.obs[3] - ref.theta_dot) <= 1e-9);
        REQUIRE(step.done == oracle::reference_done(ref));
        CHECK(step.reward == 1.0);
        if (step.done || step.truncated) break;
    }

    const CartPoleState s{0.1, -0.2, 0.03, 0.4};
    for (double fs : {0.5, 1.0}) {
        for (double ls : {0.25, 2.0}) {
            const auto got = cartpole_step(s, 1, {fs, ls});
            const auto want = oracle::cartpole_reference_step({0.1, -0.2, 0.03, 0.4}, 1, fs, ls);
            CHECK(got.state.theta_dot == doctest::Approx(want.theta_dot).epsilon(1e-14));
            CHECK(got.state.x_dot == doctest::Approx(want.x_dot).epsilon(1e-14));
        }
    }
}

TEST_CASE("cartpole mirror symmetry") {
    const CartPoleState s{0.3, -0.1, 0.05, 0.2};
    const CartPoleState m{-0.3, 0.1, -0.05, -0.2};
    for (int a = 0; a < 2; ++a) {
        const auto p = cartpole_step(s, a, {});
        const auto q = cartpole_step(m, 1 - a, {});
        CHECK(q.state.x == doctest::Approx(-p.state.x).epsilon(1e-15));
        CHECK(q.state.x_dot == doctest::Approx(-p.state.x_dot).epsilon(1e-15));
        CHECK(q.state.theta == doctest::Approx(-p.state.theta).epsilon(1e-15));
        CHECK(q.state.theta_dot == doctest::Approx(-p.state.theta_dot).epsilon(1e-15));
    }
}

TEST_CASE("zero force lets the pole fall") {
    for (int a = 0; a < 2; ++a) {
        CartPoleState s{0.0, 0.0, 0.01, 0.0};
        int t = 0;
        bool done = false;
        for (; t < 500 && !done; ++t) {
            const auto tr = cartpole_step(s, a, {0.0, 1.0});
            s = tr.state;
            done = tr.done;
        }
        CHECK(done);
        CHECK(std::abs(s.theta) > 12.0 * M_PI / 180.0);
    }
}

TEST_CASE("cartpole episode bookkeeping") {
    CartPolePhysics phys;
    phys.max_steps = 5;
    CartPoleEnv env(phys);
    env.reset(1);
    StepResult r;
    for (int i = 0; i < 5; ++i) r = env.step(i % 2);
    CHECK(r.truncated);
    CHECK_FALSE(r.done);
    CHECK_THROWS_AS(env.step(0), DomainError);
    CHECK(env.reset(9) == env.reset(9));
    CHECK_THROWS_AS(cartpole_step({NAN, 0, 0, 0}, 0, {}), NumericFault);
}

TEST_CASE("action noise") {
    Rng rng(5, "noise");
    for (int i = 0; i < 100; ++i) CHECK(apply_action_noise(i % 2, 0.0, rng) == i % 2);

    Rng full(6, "noise");
    int ones = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) ones += apply_action_noise(0, 1.0, full);
    // binomial(1e4, 1/2): sd = 50
    CHECK(std::abs(ones - n / 2) <= 150);

    Rng a(7, "noise"), b(7, "noise");
    for (int i = 0; i < 200; ++i) CHECK(apply_action_noise(1, 0.3, a) == apply_action_noise(1, 0.3, b));

    CartPoleEnv noisy({}, {PerturbationKind::action_noise, 1.0});
    int flips = 0, steps = 0;
    for (std::uint64_t ep = 0; ep < 5; ++ep) {
        noisy.reset(ep);
        StepResult r;
        do {
            r = noisy.step(1);
            flips += noisy.last_executed_action() != 1;
            ++steps;
        } while (!r.done && !r.truncated);
    }
    CHECK(flips > 0);
    CHECK(flips < steps);
}

TEST_CASE("perturbation grids") {
    const auto g = perturbation_grids();
    CHECK(g.at("action_noise") == std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    CHECK(g.at("force_scale") == std::vector<double>{0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0});
    CHECK(g.at("pole_length_scale") == std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});
    CHECK(perturbation_kind_from_string(to_string(PerturbationKind::force_scale)) == PerturbationKind::force_scale);
    CHECK_THROWS(PerturbationSpec{PerturbationKind::action_noise, 1.5}.validate());
}

TEST_CASE("tabular env sampling") {
    const auto chain = make_fail_chain(4);
    TabularEnv env(chain);
    env.reset(0);
    double ret = 0.0;
    StepResult r;
    do {
        r = env.step(0);
        ret += r.reward;
        CHECK(env.current_state() == 0);
    } while (!r.done && !r.truncated);
    CHECK(ret == 4.0);

    const auto m = make_random_rmdp(3, 2, 3, 1, 2);
    TabularEnv a(m), b(m);
    a.reset(17);
    b.reset(17);
    for (int i = 0; i < 3; ++i) CHECK(a.step(i % 2).obs == b.step(i % 2).obs);
}
