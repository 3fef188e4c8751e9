#include "drrl/linear_rmdp.hpp"

#include "drrl/errors.hpp"
#include "drrl/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace drrl {

LinearRMDP::LinearRMDP(int dim, int num_states, int num_actions, int horizon,
                       std::vector<double> features, std::vector<double> base_measures,
                       std::vector<double> theta)
    : dim_(dim), num_states_(num_states), num_actions_(num_actions), horizon_(horizon),
      features_(std::move(features)), base_measures_(std::move(base_measures)),
      theta_(std::move(theta)) {
    validate();
}

void LinearRMDP::validate() const {
    if (dim_ <= 0 || num_states_ <= 0 || num_actions_ <= 0 || horizon_ <= 0)
        throw ValidationError("d, S, A, H must be positive");
    const auto d = static_cast<std::size_t>(dim_);
    const auto S = static_cast<std::size_t>(num_states_);
    const auto A = static_cast<std::size_t>(num_actions_);
    const auto H = static_cast<std::size_t>(horizon_);
    if (features_.size() != H * S * A * d || base_measures_.size() != H * d * S || theta_.size() != H * d)
        throw ValidationError("linear model arrays have the wrong size");
    for (int h = 0; h < horizon_; ++h) {
        for (int s = 0; s < num_states_; ++s)
            for (int a = 0; a < num_actions_; ++a) {
                auto phi = features(h, s, a);
                double total = 0.0;
                for (double x : phi) {
                    if (!(x >= 0.0)) throw ValidationError("features must be non-negative");
                    total += x;
                }
                if (std::abs(total - 1.0) > 1e-12) throw ValidationError("features must sum to 1");
                const double r = std::inner_product(phi.begin(), phi.end(), theta(h).begin(), 0.0);
                if (r < -1e-12 || r > 1.0 + 1e-12) throw ValidationError("induced reward outside [0, 1]");
            }
        for (int i = 0; i < dim_; ++i) {
            auto nu = base_measure(h, i);
            double total = 0.0;
            for (double x : nu) {
                if (!(x >= 0.0)) throw ValidationError("base measures must be non-negative");
                total += x;
            }
            if (std::abs(total - 1.0) > 1e-12) throw ValidationError("base measures must sum to 1");
        }
        double norm2 = 0.0;
        for (double x : theta(h)) norm2 += x * x;
        if (norm2 > static_cast<double>(dim_) + 1e-12) throw ValidationError("||theta_h|| exceeds sqrt(d)");
    }
}

std::span<const double> LinearRMDP::features(int h, int s, int a) const {
    const auto d = static_cast<std::size_t>(dim_);
    const std::size_t off =
        ((static_cast<std::size_t>(h) * num_states_ + static_cast<std::size_t>(s)) * num_actions_ +
         static_cast<std::size_t>(a)) * d;
    return {features_.data() + off, d};
}

std::span<const double> LinearRMDP::base_measure(int h, int i) const {
    const auto S = static_cast<std::size_t>(num_states_);
    const std::size_t off = (static_cast<std::size_t>(h) * dim_ + static_cast<std::size_t>(i)) * S;
    return {base_measures_.data() + off, S};
}

std::span<const double> LinearRMDP::theta(int h) const {
    const auto d = static_cast<std::size_t>(dim_);
    return {theta_.data() + static_cast<std::size_t>(h) * d, d};
}

LinearInstance make_linear_rmdp(int dim, int num_states, int num_actions, int horizon,
                                std::uint64_t seed) {
    if (dim <= 0 || num_states <= 0 || num_actions <= 0 || horizon <= 0)
        throw ValidationError("d, S, A, H must be positive");
    if (dim > num_states * num_actions) throw ValidationError("d must not exceed S*A");
    Rng rng(seed, "linear_rmdp");
    const auto d = static_cast<std::size_t>(dim);
    std::vector<double> features, base, theta;
    for (int h = 0; h < horizon; ++h) {
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) {
                const auto phi = rng.simplex(d);
                features.insert(features.end(), phi.begin(), phi.end());
            }
        for (int i = 0; i < dim; ++i) {
            const auto nu = rng.simplex(static_cast<std::size_t>(num_states));
            base.insert(base.end(), nu.begin(), nu.end());
        }
        for (int i = 0; i < dim; ++i) theta.push_back(rng.uniform());
    }
    LinearRMDP linear(dim, num_states, num_actions, horizon, std::move(features), std::move(base),
                      std::move(theta));
    TabularRMDP tab = tabularize(linear);
    return {std::move(linear), std::move(tab)};
}

TabularRMDP tabularize(const LinearRMDP& m) {
    const int S = m.num_states(), A = m.num_actions(), H = m.horizon(), d = m.dim();
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(H) * S * A);
    TransitionKernel kernel(S, A, H);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                auto phi = m.features(h, s, a);
                double r = std::inner_product(phi.begin(), phi.end(), m.theta(h).begin(), 0.0);
                rewards.push_back(std::clamp(r, 0.0, 1.0));
                auto row = kernel.row(h, s, a);
                for (int i = 0; i < d; ++i) {
                    auto nu = m.base_measure(h, i);
                    for (int sp = 0; sp < S; ++sp)
                        row[static_cast<std::size_t>(sp)] += phi[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(sp)];
                }
                // absorb the rounding defect into the largest entry
                const double total = std::accumulate(row.begin(), row.end(), 0.0);
                auto big = std::max_element(row.begin(), row.end());
                *big += 1.0 - total;
            }
    return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel), {}, 0);
}

LinearRMDP one_hot_linear(const TabularRMDP& m) {
    const int S = m.num_states(), A = m.num_actions(), H = m.horizon(), d = S * A;
    std::vector<double> features, base, theta;
    for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                std::vector<double> phi(static_cast<std::size_t>(d), 0.0);
                phi[static_cast<std::size_t>(s * A + a)] = 1.0;
                features.insert(features.end(), phi.begin(), phi.end());
            }
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                auto row = m.kernel_row(h, s, a);
                base.insert(base.end(), row.begin(), row.end());
            }
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) theta.push_back(m.reward(h, s, a));
    }
    return LinearRMDP(d, S, A, H, std::move(features), std::move(base), std::move(theta));
}

namespace {

void check_values(const LinearRMDP& m, std::span<const double> v, int h) {
    if (v.size() != static_cast<std::size_t>(m.num_states()))
        throw DimensionError("next-step values must have S entries");
    if (h < 0 || h >= m.horizon()) throw DomainError("step out of range");
}

} // namespace

ValueTable d_rectangular_backup(const LinearRMDP& m, std::span<const double> next_values,
                                UncertaintyRadius sigma, int h) {
    check_values(m, next_values, h);
    std::vector<double> zeta(static_cast<std::size_t>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        zeta[static_cast<std::size_t>(i)] = tv_inf_expectation_ball(m.base_measure(h, i), next_values, sigma).value;
    ValueTable out(m.num_states(), m.num_actions());
    for (int s = 0; s < m.num_states(); ++s)
        for (int a = 0; a < m.num_actions(); ++a) {
            auto phi = m.features(h, s, a);
            double r = std::inner_product(phi.begin(), phi.end(), m.theta(h).begin(), 0.0);
            out(s, a) = r + std::inner_product(phi.begin(), phi.end(), zeta.begin(), 0.0);
        }
    return out;
}

std::vector<double> d_rectangular_index_duals(const LinearRMDP& m, std::span<const double> next_values,
                                              UncertaintyRadius sigma, int h) {
    check_values(m, next_values, h);
    std::vector<double> eta(static_cast<std::size_t>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        eta[static_cast<std::size_t>(i)] = tv_dual_argmin(m.base_measure(h, i), next_values, sigma);
    return eta;
}

DualTable d_rectangular_dual_table(const LinearRMDP& m, std::span<const double> next_values,
                                   UncertaintyRadius sigma, int h) {
    check_values(m, next_values, h);
    DualTable g(m.num_states(), m.num_actions());
    for (int s = 0; s < m.num_states(); ++s)
        for (int a = 0; a < m.num_actions(); ++a) {
            auto phi = m.features(h, s, a);
            double total = 0.0;
            // each index carries its own scalar dual problem, weighted by phi_i
            for (int i = 0; i < m.dim(); ++i) {
                if (phi[static_cast<std::size_t>(i)] == 0.0) continue;
                total += phi[static_cast<std::size_t>(i)] * tv_dual_argmin(m.base_measure(h, i), next_values, sigma);
            }
            g(s, a) = total;
        }
    return g;
}

std::vector<double> d_rectangular_worst_row(const LinearRMDP& m, std::span<const double> next_values,
                                            UncertaintyRadius sigma, int h, int s, int a) {
    check_values(m, next_values, h);
    std::vector<double> row(static_cast<std::size_t>(m.num_states()), 0.0);
    auto phi = m.features(h, s, a);
    for (int i = 0; i < m.dim(); ++i) {
        const auto w = tv_inf_expectation_ball(m.base_measure(h, i), next_values, sigma);
        for (std::size_t sp = 0; sp < row.size(); ++sp)
            row[sp] += phi[static_cast<std::size_t>(i)] * w.distribution[sp];
    }
    return row;
}

FeatureFit fit_in_features(const LinearRMDP& m, int h, const SaTable& table) {
    const int S = m.num_states(), A = m.num_actions(), d = m.dim();
    if (table.num_states() != S || table.num_actions() != A) throw DimensionError("table shape mismatch");
    Eigen::MatrixXd X(S * A, d);
    Eigen::VectorXd y(S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            auto phi = m.features(h, s, a);
            for (int i = 0; i < d; ++i) X(s * A + a, i) = phi[static_cast<std::size_t>(i)];
            y(s * A + a) = table(s, a);
        }
    const Eigen::VectorXd w = X.completeOrthogonalDecomposition().solve(y);
    const Eigen::VectorXd resid = X * w - y;
    FeatureFit fit;
    fit.weights.assign(w.data(), w.data() + w.size());
    fit.max_residual = resid.cwiseAbs().maxCoeff();
    return fit;
}

} // namespace drrl
