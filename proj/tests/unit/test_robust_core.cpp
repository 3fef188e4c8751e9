#include "drrl/errors.hpp"
#include "drrl/rng.hpp"
#include "drrl/robust_core.hpp"
#include "drrl/tabular_envs.hpp"

#include "../support/lp_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace drrl;

namespace {
const std::vector<double> kThird{1.0 / 3, 1.0 / 3, 1.0 / 3};
const std::vector<double> kZeroOneTwo{0.0, 1.0, 2.0};
} // namespace

TEST_CASE("tv_dual_value examples") {
    CHECK(tv_dual_value(kThird, kZeroOneTwo, UncertaintyRadius(0.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tv_dual_value(kThird, kZeroOneTwo, UncertaintyRadius(0.5)) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    // single point mass: (1 - sigma) c, i.e. a zero-valued sink is assumed reachable
    const std::vector<double> one{1.0}, c{2.5};
    CHECK(tv_dual_value(one, c, UncertaintyRadius(0.4)) == doctest::Approx(0.6 * 2.5));
}

TEST_CASE("tv_dual_value rejects bad input") {
    const std::vector<double> p{0.5, 0.5}, v{1.0};
    CHECK_THROWS_AS(tv_dual_value(p, v, UncertaintyRadius(0.1)), DimensionError);
    const std::vector<double> neg{1.5, -0.5}, v2{1.0, 2.0};
    CHECK_THROWS_AS(tv_dual_value(neg, v2, UncertaintyRadius(0.1)), DomainError);
    CHECK_THROWS(UncertaintyRadius(-0.1));
}

TEST_CASE("tv_dual_argmin examples") {
    CHECK(tv_dual_argmin(kThird, kZeroOneTwo, UncertaintyRadius(0.5)) == 1.0);
    CHECK(tv_dual_argmin(kThird, kZeroOneTwo, UncertaintyRadius(0.0)) == 2.0);
    const std::vector<double> p{0.6, 0.4}, v{1.0, 3.0};
    CHECK(tv_dual_argmin(p, v, UncertaintyRadius(0.5)) == 1.0);
    CHECK(tv_dual_argmin(p, v, UncertaintyRadius(1.0)) == 0.0);
}

TEST_CASE("tv_inf_expectation_ball examples") {
    const std::vector<double> p{0.6, 0.4}, v{1.0, 3.0};
    auto r = tv_inf_expectation_ball(p, v, UncertaintyRadius(0.3));
    CHECK(r.value == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(r.distribution[0] == doctest::Approx(0.9));
    CHECK(r.distribution[1] == doctest::Approx(0.1));

    r = tv_inf_expectation_ball(p, v, UncertaintyRadius(0.0));
    CHECK(r.value == doctest::Approx(expectation(p, v)));
    CHECK(r.distribution == p);

    r = tv_inf_expectation_ball(kThird, kZeroOneTwo, UncertaintyRadius(1.0));
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.distribution == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("ball minimizer matches an LP on random rows") {
    Rng rng(101, "test_ball_lp");
    for (int k = 0; k < 500; ++k) {
        const int S = 1 + static_cast<int>(rng.uniform_int(10));
        const double sigma = rng.uniform(0.0, 1.0);
        const auto p = rng.simplex(static_cast<std::size_t>(S));
        std::vector<double> v(static_cast<std::size_t>(S));
        for (auto& x : v) x = rng.uniform(0.0, 3.0);
        const auto got = tv_inf_expectation_ball(p, v, UncertaintyRadius(sigma));
        const auto lp = oracle::tv_ball_inf(p, v, sigma);
        REQUIRE(got.value == doctest::Approx(lp.value).epsilon(1e-10));
        // the minimizer itself is unique up to ties; check it is feasible and optimal
        double tv = 0.0, val = 0.0, mass = 0.0;
        for (int i = 0; i < S; ++i) {
            tv += std::abs(got.distribution[i] - p[i]);
            val += got.distribution[i] * v[i];
            mass += got.distribution[i];
            CHECK(got.distribution[i] >= -1e-15);
        }
        CHECK(0.5 * tv <= sigma + 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(val == doctest::Approx(lp.value).epsilon(1e-8));
    }
}

TEST_CASE("dual value equals the ball infimum with a zero sink") {
    Rng rng(202, "test_dual_sink");
    for (int k = 0; k < 2000; ++k) {
        const int S = 1 + static_cast<int>(rng.uniform_int(20));
        const UncertaintyRadius sigma(static_cast<double>(k % 11) / 10.0);
        auto p = rng.simplex(static_cast<std::size_t>(S));
        std::vector<double> v(static_cast<std::size_t>(S));
        for (auto& x : v) x = rng.uniform(0.0, 4.0);
        const double dual = tv_dual_value(p, v, sigma);
        p.push_back(0.0);
        v.push_back(0.0);
        REQUIRE(std::abs(dual - oracle::tv_ball_inf(p, v, sigma.value()).value) <= 1e-10);
    }
}

TEST_CASE("dual value is non-increasing in sigma") {
    Rng rng(303, "test_dual_mono");
    for (int k = 0; k < 200; ++k) {
        const auto p = rng.simplex(6);
        std::vector<double> v(6);
        for (auto& x : v) x = rng.uniform(0.0, 2.0);
        double prev = tv_dual_value(p, v, UncertaintyRadius(0.0));
        for (int i = 1; i <= 10; ++i) {
            const double cur = tv_dual_value(p, v, UncertaintyRadius(i / 10.0));
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("robust backup on the two-state chain") {
    const auto chain = make_fail_chain(2);
    ValueTable f_next(2, 1);
    f_next(0, 0) = 1.0;
    const auto q = robust_bellman_backup(chain, f_next, UncertaintyRadius(0.3), 0);
    CHECK(q(0, 0) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(q(1, 0) == 0.0);

    const auto zero = robust_bellman_backup(chain, ValueTable(2, 1), UncertaintyRadius(0.3), 0);
    CHECK(zero(0, 0) == 1.0);
    CHECK(zero(1, 0) == 0.0);
}

TEST_CASE("robust backup at sigma 0 equals the nominal backup") {
    const auto m = make_random_rmdp(5, 3, 3, 1, 9);
    ValueTable f(5, 3);
    Rng rng(9, "f");
    for (auto& x : f.data()) x = rng.uniform(0.0, 2.0);
    const auto v = f.state_values();
    const auto q = robust_bellman_backup(m, f, UncertaintyRadius(0.0), 1);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 3; ++a) CHECK(q(s, a) == m.reward(1, s, a) + expectation(m.kernel_row(1, s, a), v));
}

TEST_CASE("robust backward induction") {
    SUBCASE("H = 1 gives the rewards") {
        const auto m = make_random_rmdp(4, 2, 1, 1, 3);
        const auto plan = robust_backward_induction(m, UncertaintyRadius(0.5));
        for (int s = 0; s < 4; ++s) {
            CHECK(plan.q[0](s, 0) == m.reward(0, s, 0));
            CHECK(plan.v[0][s] == std::max(m.reward(0, s, 0), m.reward(0, s, 1)));
        }
    }
    SUBCASE("chain value") {
        const auto plan = robust_backward_induction(make_fail_chain(2), UncertaintyRadius(0.3));
        CHECK(plan.v[0][0] == doctest::Approx(1.7).epsilon(1e-15));
        CHECK(plan.v[2] == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("sigma 0 bit-matches the nominal dynamic program") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto m = make_random_rmdp(6, 3, 4, 2, seed);
            const auto a = robust_backward_induction(m, UncertaintyRadius(0.0));
            const auto b = backward_induction(m);
            CHECK(a.v == b.v);
            CHECK(a.policy == b.policy);
        }
    }
    SUBCASE("values stay in [0, H - h]") {
        const auto m = make_random_rmdp(6, 3, 4, 1, 5);
        const auto plan = robust_backward_induction(m, UncertaintyRadius(0.2));
        for (int h = 0; h <= 4; ++h)
            for (double x : plan.v[h]) {
                CHECK(x >= 0.0);
                CHECK(x <= 4 - h + 1e-12);
            }
    }
}

TEST_CASE("robust policy evaluation") {
    const auto m = make_random_rmdp(5, 2, 3, 1, 17);
    const auto plan = robust_backward_induction(m, UncertaintyRadius(0.3));
    const auto ev = robust_policy_evaluation(m, plan.policy, UncertaintyRadius(0.3));
    for (int h = 0; h <= 3; ++h)
        for (int s = 0; s < 5; ++s) CHECK(std::abs(ev.v[h][s] - plan.v[h][s]) <= 1e-10);

    const auto chain = robust_policy_evaluation(make_fail_chain(2), DeterministicPolicy(2, 2), UncertaintyRadius(0.3));
    CHECK(chain.v[0][0] == doctest::Approx(1.7));

    DeterministicPolicy pi(3, 5, 1);
    double prev = 1e9;
    for (double sigma : {0.0, 0.1, 0.2, 0.4, 0.7, 1.0}) {
        const double v = robust_policy_evaluation(m, pi, UncertaintyRadius(sigma)).v[0][m.initial_state()];
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("empirical dual loss") {
    const auto chain = make_fail_chain(2);
    DualTable g(2, 1);
    g(0, 0) = 2.0;
    ValueTable f_next(2, 1);
    f_next(0, 0) = 1.0;
    const std::vector<TransitionSample> one{{0, 0, 0, 1.0, 0}};
    CHECK(empirical_dual_loss(g, f_next, one, UncertaintyRadius(0.4)).value == doctest::Approx(-0.2));
    const std::vector<TransitionSample> two{{0, 0, 0, 1.0, 0}, {0, 0, 0, 1.0, 0}};
    CHECK(empirical_dual_loss(g, f_next, two, UncertaintyRadius(0.4)).value == doctest::Approx(-0.4));
    CHECK(empirical_dual_loss(DualTable(2, 1), f_next, two, UncertaintyRadius(0.4)).value == 0.0);
    const auto empty = empirical_dual_loss(g, f_next, {}, UncertaintyRadius(0.4));
    CHECK(empty.empty_data);
    CHECK(empty.value == 0.0);
}

TEST_CASE("dual-form backup reproduces the robust backup at the exact dual") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = make_random_rmdp(5, 2, 2, 1, seed);
        ValueTable f(5, 2);
        Rng rng(seed, "f_next");
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) f(s, a) = rng.uniform(0.0, 1.0);
        const UncertaintyRadius sigma(0.35);
        const auto g = exact_dual_table(m, f, sigma, 0);
        const auto dual_form = empirical_robust_backup_g(m, f, g, sigma, 0);
        const auto exact = robust_bellman_backup(m, f, sigma, 0);
        for (int s = 0; s < 5; ++s)
            for (int a = 0; a < 2; ++a) CHECK(std::abs(dual_form(s, a) - exact(s, a)) <= 1e-12);
    }
    const auto m = make_random_rmdp(3, 2, 2, 1, 4);
    const auto r = empirical_robust_backup_g(m, ValueTable(3, 2), DualTable(3, 2), UncertaintyRadius(0.5), 0);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) CHECK(r(s, a) == m.reward(0, s, a));
}

TEST_CASE("model validation") {
    TransitionKernel k(2, 1, 1);
    k.row(0, 0, 0)[0] = 0.5;
    k.row(0, 0, 0)[1] = 0.4;
    k.row(0, 1, 0)[1] = 1.0;
    CHECK_THROWS_AS(TabularRMDP(2, 1, 1, {0.5, 0.0}, k, {1}, 0), ValidationError);
    k.row(0, 0, 0)[1] = 0.5;
    CHECK_THROWS_AS(TabularRMDP(2, 1, 1, {1.5, 0.0}, k, {1}, 0), ValidationError);
    CHECK_THROWS_AS(TabularRMDP(2, 1, 1, {0.5, 0.2}, k, {1}, 0), ValidationError);
    TransitionKernel escape(2, 1, 1);
    escape.row(0, 0, 0)[0] = 1.0;
    escape.row(0, 1, 0)[0] = 1.0;
    CHECK_THROWS_AS(TabularRMDP(2, 1, 1, {0.5, 0.0}, escape, {1}, 0), ValidationError);
    CHECK_NOTHROW(TabularRMDP(2, 1, 1, {0.5, 0.0}, k, {1}, 0));
}
