#include "drrl/errors.hpp"
#include "drrl/linear_rmdp.hpp"
#include "drrl/occupancy.hpp"
#include "drrl/tabular_envs.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace drrl;

namespace {

// Independent enumeration: sup over policies of each d_h(s,a) under that policy's worst kernel.
std::vector<double> sup_visitation(const TabularRMDP& m, UncertaintyRadius sigma, int h) {
    const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
    std::vector<double> best(static_cast<std::size_t>(S * A), 0.0);
    const auto n = static_cast<std::uint64_t>(policy_count(S, A, H));
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto pi = policy_from_index(i, S, A, H);
        const auto d = occupancy_under(worst_kernel_for_policy(m, pi, sigma), pi, m.initial_state());
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) best[s * A + a] = std::max(best[s * A + a], d(h, s, a));
    }
    return best;
}

double tv(std::span<const double> p, std::span<const double> q) {
    double t = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) t += std::abs(p[i] - q[i]);
    return 0.5 * t;
}

} // namespace

TEST_CASE("worst kernel examples") {
    const auto chain = make_fail_chain(2);
    const DeterministicPolicy pi(2, 2);
    const auto w = worst_kernel_for_policy(chain, pi, UncertaintyRadius(0.3));
    CHECK(w.row(0, 0, 0)[1] == doctest::Approx(0.3));
    CHECK(w.row(0, 0, 0)[0] == doctest::Approx(0.7));
    // the last step has zero continuation value everywhere, so nothing moves
    CHECK(w.row(1, 0, 0)[0] == 1.0);

    const auto m = make_random_rmdp(4, 2, 3, 1, 11);
    const DeterministicPolicy p(3, 4, 1);
    CHECK(worst_kernel_for_policy(m, p, UncertaintyRadius(0.0)) == m.kernel());

    // sigma = 1: every row sits on next states of minimal continuation value. Outcomes already at
    // the minimum keep their mass, so the row is a point mass only when the minimizer is unique.
    const UncertaintyRadius one(1.0);
    const auto full = worst_kernel_for_policy(m, p, one);
    const auto values = robust_policy_evaluation(m, p, one);
    for (int h = 0; h < 3; ++h) {
        const auto& v = values.v[h + 1];
        const double vmin = *std::min_element(v.begin(), v.end());
        const auto unique = std::count(v.begin(), v.end(), vmin) == 1;
        for (int s = 0; s < 4; ++s) {
            const auto row = full.row(h, s, p(h, s));
            for (int t = 0; t < 4; ++t)
                if (row[t] > 1e-12) CHECK(v[t] == vmin);
            if (unique) CHECK(*std::max_element(row.begin(), row.end()) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("worst kernel stays in the ball and attains the robust value") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = make_random_rmdp(5, 2, 4, 1, seed);
        const UncertaintyRadius sigma(0.1 * static_cast<double>(seed % 7));
        DeterministicPolicy pi(4, 5);
        for (int h = 0; h < 4; ++h)
            for (int s = 0; s < 5; ++s) pi(h, s) = (h + s + static_cast<int>(seed)) % 2;
        const auto w = worst_kernel_for_policy(m, pi, sigma);
        for (int h = 0; h < 4; ++h)
            for (int s = 0; s < 5; ++s)
                for (int a = 0; a < 2; ++a) CHECK(tv(w.row(h, s, a), m.kernel_row(h, s, a)) <= sigma.effective() + 1e-12);
        const auto nominal_eval = policy_evaluation_under(m, w, pi);
        const auto robust = robust_policy_evaluation(m, pi, sigma);
        for (int h = 0; h <= 4; ++h)
            for (int s = 0; s < 5; ++s) CHECK(std::abs(nominal_eval.v[h][s] - robust.v[h][s]) <= 1e-10);
    }
}

TEST_CASE("occupancy examples") {
    const auto chain = make_fail_chain(3);
    const DeterministicPolicy pi(3, 2);
    const auto nominal = occupancy_under(chain, pi);
    for (int h = 0; h < 3; ++h) CHECK(nominal(h, 0, 0) == 1.0);

    const auto d = occupancy_under(worst_kernel_for_policy(chain, pi, UncertaintyRadius(0.3)), pi, 0);
    CHECK(d(0, 0, 0) == 1.0);
    CHECK(d(1, 0, 0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(d(2, 0, 0) == doctest::Approx(0.49).epsilon(1e-14));
    CHECK(d(2, 1, 0) == doctest::Approx(0.51).epsilon(1e-14));
    for (int h = 0; h < 3; ++h) CHECK(d.step_mass(h) == doctest::Approx(1.0).epsilon(1e-14));

    // deterministic kernel and policy give a point mass at each step
    TransitionKernel k(3, 2, 2);
    for (int h = 0; h < 2; ++h)
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a) k.row(h, s, a)[(s + a + 1) % 3] = 1.0;
    const DeterministicPolicy det(2, 3, std::vector<int>{1, 0, 1, 0, 1, 1});
    const auto point = occupancy_under(k, det, 0);
    CHECK(point(0, 0, 1) == 1.0);
    CHECK(point(1, 2, 1) == 1.0);
    CHECK(point.step_mass(1) == 1.0);
}

TEST_CASE("policy indexing") {
    CHECK(policy_count(2, 3, 2) == 81.0);
    const auto pi = policy_from_index(5, 2, 3, 2); // 5 = 0,0,1,2 in base 3
    CHECK(pi.actions() == std::vector<int>{0, 0, 1, 2});
    CHECK(policy_from_index(80, 2, 3, 2).actions() == std::vector<int>{2, 2, 2, 2});
}

TEST_CASE("robust coverability examples") {
    SUBCASE("sigma 0") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto r = robust_coverability(make_random_rmdp(3, 2, 2, 1, seed), UncertaintyRadius(0.0));
            CHECK_FALSE(r.infinite);
            CHECK(r.c_rcov == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("single state") {
        TransitionKernel k(1, 2, 3);
        for (int h = 0; h < 3; ++h)
            for (int a = 0; a < 2; ++a) k.row(h, 0, a)[0] = 1.0;
        const TabularRMDP one(1, 2, 3, std::vector<double>(6, 0.5), k, {}, 0);
        const auto r = robust_coverability(one, UncertaintyRadius(0.4));
        CHECK_FALSE(r.infinite);
        CHECK(r.c_rcov == 1.0);
    }
    SUBCASE("fail chain at sigma 0.3, H = 2") {
        // the worst case sends 0.3 to the fail state, which the nominal chain never reaches
        const auto r = robust_coverability(make_fail_chain(2), UncertaintyRadius(0.3));
        CHECK(r.infinite);
        CHECK(r.witness_hsa == StateActionStep{1, 1, 0});
        CHECK(r.c_rcov == 1.0);
        CHECK(r.per_step == std::vector<double>{1.0, 1.0});
        CHECK(r.policies_enumerated == 1);
    }
    SUBCASE("budget refusal") {
        CHECK_THROWS_AS(robust_coverability(make_random_rmdp(4, 3, 3, 1, 0), UncertaintyRadius(0.2), 1e3),
                        BudgetExceeded);
    }
}

TEST_CASE("robust coverability against an independent enumeration") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto m = make_random_rmdp(3, 2, 2, 1, seed);
        const UncertaintyRadius sigma(0.2);
        const auto r = robust_coverability(m, sigma);
        double ratio = 0.0;
        bool inf = false;
        const auto n = static_cast<std::uint64_t>(policy_count(3, 2, 2));
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto pi = policy_from_index(i, 3, 2, 2);
            const auto d = occupancy_under(worst_kernel_for_policy(m, pi, sigma), pi, 0);
            const auto mu = occupancy_under(m, pi);
            for (int h = 0; h < 2; ++h)
                for (int s = 0; s < 3; ++s)
                    for (int a = 0; a < 2; ++a) {
                        if (mu(h, s, a) > 0) ratio = std::max(ratio, d(h, s, a) / mu(h, s, a));
                        else if (d(h, s, a) > 0) inf = true;
                    }
        }
        CHECK(r.infinite == inf);
        CHECK(r.c_rcov == doctest::Approx(ratio).epsilon(1e-12));
        CHECK(r.policies_enumerated == n);
        CHECK(robust_coverability(m, sigma, kDefaultPolicyBudget, 3).c_rcov == r.c_rcov);
    }
}

TEST_CASE("robust coverability can exceed S*A") {
    // a state reached with tiny nominal probability but large worst-case mass gives a ratio
    // far above S*A; the S*A cap only bounds the cumulative visitation
    bool found = false;
    for (std::uint64_t seed = 0; seed < 20 && !found; ++seed) {
        const auto m = make_random_rmdp(3, 2, 3, 1, seed);
        const auto r = robust_coverability(m, UncertaintyRadius(0.5));
        if (!r.infinite && r.c_rcov > 6.0) found = true;
    }
    CHECK(found);
}

TEST_CASE("cumulative visitation") {
    const auto chain = make_fail_chain(2);
    CHECK(cumulative_visitation(chain, UncertaintyRadius(0.0), 1) == 1.0);
    CHECK(cumulative_visitation(chain, UncertaintyRadius(0.3), 1) == doctest::Approx(1.0));

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = make_random_rmdp(3, 2, 2, 1, seed);
        for (int h = 0; h < 2; ++h) {
            const auto sup = sup_visitation(m, UncertaintyRadius(0.2), h);
            double sum = 0.0;
            for (double x : sup) sum += x;
            const double got = cumulative_visitation(m, UncertaintyRadius(0.2), h);
            CHECK(std::abs(got - sum) <= 1e-9);
            CHECK(got <= 6.0 + 1e-12);
            CHECK(robust_coverability(m, UncertaintyRadius(0.2)).per_step[h] == doctest::Approx(got).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear coverability bound check") {
    const auto inst = make_linear_rmdp(2, 4, 2, 2, 7);
    const auto zero = linear_coverability_bound_check(inst.linear, UncertaintyRadius(0.0));
    CHECK(zero.c_rcov == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.bound == 4.0);
    CHECK(zero.holds);

    const auto r = linear_coverability_bound_check(inst.linear, UncertaintyRadius(0.3));
    CHECK(r.bound == 4.0);
    const auto direct = robust_coverability(inst.tabular, UncertaintyRadius(0.3));
    CHECK(r.infinite == direct.infinite);
    CHECK(r.c_rcov == doctest::Approx(direct.c_rcov).epsilon(1e-12));
    CHECK(r.holds == (!r.infinite && r.c_rcov <= r.bound + 1e-12));
    MESSAGE("d=2 S=4 A=2 seed 7 sigma 0.3: C_rcov = " << r.c_rcov << std::string(r.infinite ? " (infinite)" : ""));
}
