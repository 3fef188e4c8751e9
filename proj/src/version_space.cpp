#include "drrl/version_space.hpp"

#include "drrl/errors.hpp"
#include "drrl/format.hpp"
#include "drrl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace drrl {

// ---------------------------------------------------------------------------
// EnumeratedClass
// ---------------------------------------------------------------------------

EnumeratedClass EnumeratedClass::grid(int num_states, int num_actions, int horizon, std::vector<double> levels,
                                      double budget) {
    if (num_states <= 0 || num_actions <= 0 || horizon <= 0) throw ValidationError("S, A, H must be positive");
    if (levels.empty()) throw ValidationError("grid needs at least one level");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw ValidationError("grid levels must be strictly increasing");
    const double entries = static_cast<double>(num_states) * num_actions;
    const double required = std::pow(static_cast<double>(levels.size()), entries);
    if (required > budget)
        throw BudgetExceeded("grid class needs " + std::to_string(required) + " tables per step, budget is " +
                                 std::to_string(budget),
                             required, budget);
    EnumeratedClass c;
    c.num_states_ = num_states;
    c.num_actions_ = num_actions;
    c.horizon_ = horizon;
    c.grid_ = true;
    c.levels_ = std::move(levels);
    c.grid_size_ = static_cast<std::uint64_t>(std::llround(required));
    return c;
}

EnumeratedClass EnumeratedClass::explicit_tables(int num_states, int num_actions,
                                                 std::vector<std::vector<SaTable>> tables_per_step) {
    if (tables_per_step.empty()) throw ValidationError("class needs at least one step");
    for (const auto& step : tables_per_step) {
        if (step.empty()) throw ValidationError("every step of a class must be non-empty");
        for (const auto& t : step)
            if (t.num_states() != num_states || t.num_actions() != num_actions)
                throw DimensionError("class table shape mismatch");
    }
    EnumeratedClass c;
    c.num_states_ = num_states;
    c.num_actions_ = num_actions;
    c.horizon_ = static_cast<int>(tables_per_step.size());
    c.tables_ = std::move(tables_per_step);
    return c;
}

std::uint64_t EnumeratedClass::size(int h) const {
    if (h < 0 || h >= horizon_) throw DomainError("step out of range");
    return grid_ ? grid_size_ : tables_[static_cast<std::size_t>(h)].size();
}

std::vector<int> EnumeratedClass::digits(std::uint64_t index) const {
    if (!grid_) throw ValidationError("digits are defined for grid classes only");
    const int E = num_states_ * num_actions_;
    const auto L = static_cast<std::uint64_t>(levels_.size());
    std::vector<int> d(static_cast<std::size_t>(E));
    for (int e = E - 1; e >= 0; --e) {
        d[static_cast<std::size_t>(e)] = static_cast<int>(index % L);
        index /= L;
    }
    return d;
}

std::uint64_t EnumeratedClass::index_of_digits(std::span<const int> digits) const {
    const auto L = static_cast<std::uint64_t>(levels_.size());
    std::uint64_t idx = 0;
    for (int d : digits) idx = idx * L + static_cast<std::uint64_t>(d);
    return idx;
}

SaTable EnumeratedClass::table(int h, std::uint64_t index) const {
    if (index >= size(h)) throw DomainError("class index out of range");
    if (!grid_) return tables_[static_cast<std::size_t>(h)][index];
    SaTable t(num_states_, num_actions_);
    const auto d = digits(index);
    for (std::size_t e = 0; e < d.size(); ++e) t.data()[e] = levels_[static_cast<std::size_t>(d[e])];
    return t;
}

std::uint64_t EnumeratedClass::nearest_index(const SaTable& target) const {
    if (!grid_) throw ValidationError("nearest_index needs a grid class");
    std::vector<int> d;
    for (double x : target.data()) {
        int best = 0;
        for (std::size_t j = 1; j < levels_.size(); ++j)
            if (std::abs(levels_[j] - x) < std::abs(levels_[static_cast<std::size_t>(best)] - x))
                best = static_cast<int>(j);
        d.push_back(best);
    }
    return index_of_digits(d);
}

std::vector<double> grid_levels(double upper, double delta) {
    if (!(delta > 0.0) || !(upper >= 0.0)) throw ValidationError("grid step must be positive");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double x = i * delta;
        if (x > upper + 1e-9) break;
        out.push_back(x);
    }
    return out;
}

GridClasses build_grid_class(const TabularRMDP& rmdp, UncertaintyRadius sigma, double delta_f, double delta_g,
                             double budget) {
    const double H = rmdp.horizon();
    // eta* never exceeds max V <= H, so the dual grid can stop at H
    const double g_upper = sigma.is_zero() ? H : std::min(H, 2.0 * H / sigma.value());
    return {EnumeratedClass::grid(rmdp.num_states(), rmdp.num_actions(), rmdp.horizon(),
                                  grid_levels(H, delta_f), budget),
            EnumeratedClass::grid(rmdp.num_states(), rmdp.num_actions(), rmdp.horizon(),
                                  grid_levels(g_upper, delta_g), budget)};
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

namespace {

template <class T>
T as(const SaTable& t) {
    T out(t.num_states(), t.num_actions());
    std::copy(t.data().begin(), t.data().end(), out.data().begin());
    return out;
}

void check_samples(std::span<const TransitionSample> data, int S, int A, std::size_t nv) {
    for (const auto& x : data)
        if (x.s < 0 || x.s >= S || x.a < 0 || x.a >= A || x.next_state < 0 ||
            static_cast<std::size_t>(x.next_state) >= nv)
            throw DomainError("sample index out of range");
}

// Samples bucketed by row-major (s,a) entry.
struct EntrySamples {
    std::vector<double> r;
    std::vector<double> v_next;
};

std::vector<EntrySamples> bucket(std::span<const TransitionSample> data, std::span<const double> v, int S, int A) {
    check_samples(data, S, A, v.size());
    std::vector<EntrySamples> out(static_cast<std::size_t>(S * A));
    for (const auto& x : data) {
        auto& b = out[static_cast<std::size_t>(x.s * A + x.a)];
        b.r.push_back(x.r);
        b.v_next.push_back(v[static_cast<std::size_t>(x.next_state)]);
    }
    return out;
}

// Per-entry dual ERM over the level list; smallest level on ties.
int entry_dual_argmin(const EntrySamples& b, const std::vector<double>& levels, double keep, double* loss_out) {
    int best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double g = levels[j];
        double loss = 0.0;
        for (double v : b.v_next) loss += std::max(g - v, 0.0) - keep * g;
        if (loss < best_loss) {
            best_loss = loss;
            best = static_cast<int>(j);
        }
    }
    if (loss_out) *loss_out = b.v_next.empty() ? 0.0 : best_loss;
    return best;
}

// Excess squared loss of each F level per entry against the dual-form targets, plus the g digits used.
struct ExcessTable {
    std::vector<std::vector<double>> excess; // [entry][level]
};

ExcessTable excess_table(const std::vector<EntrySamples>& buckets, const std::vector<double>& f_levels,
                         const std::vector<double>& g_levels, double keep) {
    ExcessTable t;
    t.excess.resize(buckets.size());
    for (std::size_t e = 0; e < buckets.size(); ++e) {
        const auto& b = buckets[e];
        auto& row = t.excess[e];
        row.assign(f_levels.size(), 0.0);
        if (b.r.empty()) continue;
        const double g = g_levels[static_cast<std::size_t>(entry_dual_argmin(b, g_levels, keep, nullptr))];
        std::vector<double> y(b.r.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = b.r[i] - std::max(g - b.v_next[i], 0.0) + keep * g;
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < f_levels.size(); ++j) {
            double l = 0.0;
            for (double yi : y) l += (f_levels[j] - yi) * (f_levels[j] - yi);
            row[j] = l;
            lo = std::min(lo, l);
        }
        for (double& l : row) l -= lo;
    }
    return t;
}

} // namespace

DualErmResult dual_erm(std::span<const double> v, const EnumeratedClass& G, int h,
                       std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    const int S = G.num_states(), A = G.num_actions();
    if (v.size() != static_cast<std::size_t>(S)) throw DimensionError("next-step values must have S entries");
    if (data.empty()) return {0, 0.0, true};
    if (!G.is_grid()) {
        ValueTable f_next(S, 1);
        for (int s = 0; s < S; ++s) f_next(s, 0) = v[static_cast<std::size_t>(s)];
        return dual_erm_bruteforce(f_next, G, h, data, sigma);
    }
    (void)G.size(h);
    const double keep = 1.0 - sigma.effective();
    const auto buckets = bucket(data, v, S, A);
    std::vector<int> d(buckets.size());
    double total = 0.0;
    for (std::size_t e = 0; e < buckets.size(); ++e) {
        double l = 0.0;
        d[e] = entry_dual_argmin(buckets[e], G.levels(), keep, &l);
        total += l;
    }
    return {G.index_of_digits(d), total, false};
}

DualErmResult dual_erm(const ValueTable& f_next, const EnumeratedClass& G, int h,
                       std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    const auto v = f_next.state_values();
    return dual_erm(v, G, h, data, sigma);
}

DualErmResult dual_erm_bruteforce(const ValueTable& f_next, const EnumeratedClass& G, int h,
                                  std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    if (data.empty()) return {0, 0.0, true};
    DualErmResult best{0, std::numeric_limits<double>::infinity(), false};
    for (std::uint64_t i = 0; i < G.size(h); ++i) {
        const double l = empirical_dual_loss(as<DualTable>(G.table(h, i)), f_next, data, sigma).value;
        if (l < best.loss) best = {i, l, false};
    }
    return best;
}

LossValue squared_bellman_loss(const ValueTable& f_prime, std::span<const double> v, const DualTable& g,
                               std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    if (data.empty()) return {0.0, true};
    check_samples(data, f_prime.num_states(), f_prime.num_actions(), v.size());
    if (g.num_states() != f_prime.num_states() || g.num_actions() != f_prime.num_actions())
        throw DimensionError("dual table shape mismatch");
    const double keep = 1.0 - sigma.effective();
    double total = 0.0;
    for (const auto& x : data) {
        const double gv = g(x.s, x.a);
        const double target = x.r - std::max(gv - v[static_cast<std::size_t>(x.next_state)], 0.0) + keep * gv;
        const double resid = f_prime(x.s, x.a) - target;
        total += resid * resid;
    }
    return {total, false};
}

LossValue squared_bellman_loss(const ValueTable& f_prime, const ValueTable& f_next, const DualTable& g,
                               std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    const auto v = f_next.state_values();
    return squared_bellman_loss(f_prime, v, g, data, sigma);
}

// ---------------------------------------------------------------------------
// Confidence sets
// ---------------------------------------------------------------------------

std::string to_string(ConfidenceSemantics s) { return s == ConfidenceSemantics::forall ? "forall" : "pairwise"; }

ConfidenceSemantics confidence_semantics_from_string(const std::string& name) {
    if (name == "forall") return ConfidenceSemantics::forall;
    if (name == "pairwise") return ConfidenceSemantics::pairwise;
    throw ValidationError("unknown confidence semantics '" + name + "'");
}

std::vector<std::uint64_t> ConfidenceState::survivor_counts() const {
    std::vector<std::uint64_t> out;
    for (const auto& a : alive)
        out.push_back(static_cast<std::uint64_t>(std::count(a.begin(), a.end(), char{1})));
    return out;
}

ConfidenceState initial_confidence_state(const EnumeratedClass& F, double beta) {
    if (!(beta >= 0.0)) throw DomainError("beta must be non-negative");
    ConfidenceState st;
    st.beta = beta;
    st.data.resize(static_cast<std::size_t>(F.horizon()));
    for (int h = 0; h < F.horizon(); ++h) st.alive.emplace_back(F.size(h), char{1});
    return st;
}

EmptyConfidenceSet::EmptyConfidenceSet(int step, double min_beta)
    : std::runtime_error("confidence set at step " + std::to_string(step) + " is empty; beta >= " +
                         fmt17(min_beta) + " would keep one table"),
      step_(step), min_beta_(min_beta) {}

namespace {

// Distinct next-step value vectors among survivors, in first-seen (index) order, with one representative each.
struct NextValues {
    std::vector<std::vector<double>> v;
    std::vector<std::uint64_t> representative;
};

NextValues distinct_next_values(const ConfidenceState& st, const EnumeratedClass& F, int h) {
    NextValues out;
    const int S = F.num_states(), A = F.num_actions();
    if (h + 1 >= F.horizon()) {
        out.v.emplace_back(static_cast<std::size_t>(S), 0.0);
        out.representative.push_back(0);
        return out;
    }
    std::map<std::vector<double>, std::size_t> seen;
    const auto& alive = st.alive[static_cast<std::size_t>(h + 1)];
    for (std::uint64_t i = 0; i < alive.size(); ++i) {
        if (!alive[i]) continue;
        std::vector<double> v;
        if (F.is_grid()) {
            const auto d = F.digits(i);
            for (int s = 0; s < S; ++s) {
                int m = 0;
                for (int a = 0; a < A; ++a) m = std::max(m, d[static_cast<std::size_t>(s * A + a)]);
                v.push_back(F.levels()[static_cast<std::size_t>(m)]);
            }
        } else {
            v = F.table(h + 1, i).state_values();
        }
        if (seen.emplace(v, out.v.size()).second) {
            out.v.push_back(std::move(v));
            out.representative.push_back(i);
        }
    }
    return out;
}

void finish_step(ConfidenceState& st, int h, const std::vector<double>& agg, ConfidenceSemantics sem) {
    auto& alive = st.alive[static_cast<std::size_t>(h)];
    bool any = false;
    for (std::size_t i = 0; i < agg.size(); ++i) {
        alive[i] = agg[i] <= st.beta ? 1 : 0;
        any = any || alive[i];
    }
    (void)sem;
    if (!any) throw EmptyConfidenceSet(h, *std::min_element(agg.begin(), agg.end()));
}

} // namespace

ConfidenceState update_confidence_set(const ConfidenceState& state, const EnumeratedClass& F,
                                      const EnumeratedClass& G, UncertaintyRadius sigma,
                                      ConfidenceSemantics semantics) {
    if (!F.is_grid() || !G.is_grid()) return update_confidence_set_bruteforce(state, F, G, sigma, semantics);
    ConfidenceState st = state;
    const int S = F.num_states(), A = F.num_actions(), E = S * A;
    const double keep = 1.0 - sigma.effective();
    const auto L = F.levels().size();
    for (int h = F.horizon() - 1; h >= 0; --h) {
        const auto& data = st.data[static_cast<std::size_t>(h)];
        const auto next = distinct_next_values(st, F, h);
        const bool forall = semantics == ConfidenceSemantics::forall;
        const std::uint64_t n = F.size(h);
        // worst (forall) or best (pairwise) gap of each f_h across the next-step value vectors
        std::vector<double> agg(n, forall ? 0.0 : std::numeric_limits<double>::infinity());
        for (const auto& v : next.v) {
            const auto ex = excess_table(bucket(data, v, S, A), F.levels(), G.levels(), keep);
            std::vector<int> d(static_cast<std::size_t>(E), 0);
            for (std::uint64_t i = 0; i < n; ++i) {
                double gap = 0.0;
                for (int e = 0; e < E; ++e)
                    gap += ex.excess[static_cast<std::size_t>(e)][static_cast<std::size_t>(d[static_cast<std::size_t>(e)])];
                agg[i] = forall ? std::max(agg[i], gap) : std::min(agg[i], gap);
                // advance the mixed-radix counter
                for (int e = E - 1; e >= 0; --e) {
                    if (static_cast<std::size_t>(++d[static_cast<std::size_t>(e)]) < L) break;
                    d[static_cast<std::size_t>(e)] = 0;
                }
            }
        }
        finish_step(st, h, agg, semantics);
    }
    return st;
}

ConfidenceState update_confidence_set_bruteforce(const ConfidenceState& state, const EnumeratedClass& F,
                                                 const EnumeratedClass& G, UncertaintyRadius sigma,
                                                 ConfidenceSemantics semantics) {
    ConfidenceState st = state;
    const int S = F.num_states(), A = F.num_actions();
    const bool forall = semantics == ConfidenceSemantics::forall;
    for (int h = F.horizon() - 1; h >= 0; --h) {
        const auto& data = st.data[static_cast<std::size_t>(h)];
        std::vector<ValueTable> nexts;
        if (h + 1 >= F.horizon()) {
            nexts.emplace_back(S, A, 0.0);
        } else {
            const auto& alive = st.alive[static_cast<std::size_t>(h + 1)];
            for (std::uint64_t i = 0; i < alive.size(); ++i)
                if (alive[i]) nexts.push_back(as<ValueTable>(F.table(h + 1, i)));
        }
        const std::uint64_t n = F.size(h);
        std::vector<double> agg(n, forall ? 0.0 : std::numeric_limits<double>::infinity());
        for (const auto& f_next : nexts) {
            const auto g = as<DualTable>(G.table(h, dual_erm_bruteforce(f_next, G, h, data, sigma).index));
            std::vector<double> losses(n);
            for (std::uint64_t i = 0; i < n; ++i)
                losses[i] = squared_bellman_loss(as<ValueTable>(F.table(h, i)), f_next, g, data, sigma).value;
            const double lo = *std::min_element(losses.begin(), losses.end());
            for (std::uint64_t i = 0; i < n; ++i)
                agg[i] = forall ? std::max(agg[i], losses[i] - lo) : std::min(agg[i], losses[i] - lo);
        }
        finish_step(st, h, agg, semantics);
    }
    return st;
}

double loss_gap(const EnumeratedClass& F, const EnumeratedClass& G, int h, std::uint64_t f_index,
                std::span<const double> v, std::span<const TransitionSample> data, UncertaintyRadius sigma) {
    if (data.empty()) return 0.0;
    const int S = F.num_states(), A = F.num_actions();
    const double keep = 1.0 - sigma.effective();
    if (F.is_grid() && G.is_grid()) {
        const auto ex = excess_table(bucket(data, v, S, A), F.levels(), G.levels(), keep);
        const auto d = F.digits(f_index);
        double gap = 0.0;
        for (std::size_t e = 0; e < d.size(); ++e) gap += ex.excess[e][static_cast<std::size_t>(d[e])];
        return gap;
    }
    ValueTable f_next(S, 1);
    for (int s = 0; s < S; ++s) f_next(s, 0) = v[static_cast<std::size_t>(s)];
    const auto g = as<DualTable>(G.table(h, dual_erm_bruteforce(f_next, G, h, data, sigma).index));
    double lo = std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < F.size(h); ++i)
        lo = std::min(lo, squared_bellman_loss(as<ValueTable>(F.table(h, i)), v, g, data, sigma).value);
    return squared_bellman_loss(as<ValueTable>(F.table(h, f_index)), v, g, data, sigma).value - lo;
}

Selection optimistic_select(const ConfidenceState& st, const EnumeratedClass& F, const EnumeratedClass& G,
                            UncertaintyRadius sigma, ConfidenceSemantics semantics, int s1) {
    const int H = F.horizon(), S = F.num_states();
    if (s1 < 0 || s1 >= S) throw DomainError("initial state out of range");
    Selection sel;
    sel.f_index.assign(static_cast<std::size_t>(H), 0);
    sel.value = -std::numeric_limits<double>::infinity();
    bool found = false;
    const auto& alive0 = st.alive[0];
    for (std::uint64_t i = 0; i < alive0.size(); ++i) {
        if (!alive0[i]) continue;
        const double val = F.table(0, i).max_over_actions(s1);
        if (val > sel.value) {
            sel.value = val;
            sel.f_index[0] = i;
            found = true;
        }
    }
    if (!found) throw EmptyConfidenceSet(0, std::numeric_limits<double>::quiet_NaN());
    for (int h = 1; h < H; ++h) {
        const auto& alive = st.alive[static_cast<std::size_t>(h)];
        bool ok = false;
        std::map<std::vector<double>, bool> compatible; // cache by value vector
        for (std::uint64_t i = 0; i < alive.size() && !ok; ++i) {
            if (!alive[i]) continue;
            if (semantics == ConfidenceSemantics::forall) {
                sel.f_index[static_cast<std::size_t>(h)] = i;
                ok = true;
                break;
            }
            const auto v = F.table(h, i).state_values();
            auto it = compatible.find(v);
            if (it == compatible.end()) {
                const double gap = loss_gap(F, G, h - 1, sel.f_index[static_cast<std::size_t>(h - 1)], v,
                                            st.data[static_cast<std::size_t>(h - 1)], sigma);
                it = compatible.emplace(v, gap <= st.beta).first;
            }
            if (it->second) {
                sel.f_index[static_cast<std::size_t>(h)] = i;
                ok = true;
            }
        }
        if (!ok) throw EmptyConfidenceSet(h, std::numeric_limits<double>::quiet_NaN());
    }
    sel.policy = DeterministicPolicy(H, S, 0);
    for (int h = 0; h < H; ++h) {
        const auto t = F.table(h, sel.f_index[static_cast<std::size_t>(h)]);
        for (int s = 0; s < S; ++s) sel.policy(h, s) = t.argmax_action(s);
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Online loop
// ---------------------------------------------------------------------------

double default_beta(int horizon, UncertaintyRadius sigma, int episodes, double f_size, double g_size, double delta) {
    const double scale = sigma.is_zero() ? horizon : std::min<double>(horizon, 1.0 / sigma.value());
    return scale * std::log(static_cast<double>(episodes) * horizon * f_size * g_size / delta);
}

RegretTrace run_rfltv_exact(const TabularRMDP& rmdp, const RfltvConfig& cfg) {
    if (cfg.episodes <= 0) throw ValidationError("episodes must be positive");
    const UncertaintyRadius sigma(cfg.sigma);
    const auto classes = build_grid_class(rmdp, sigma, cfg.delta_f, cfg.delta_g, cfg.class_budget);
    const auto& F = classes.f;
    const auto& G = classes.g;
    const int H = rmdp.horizon(), S = rmdp.num_states();
    const int s1 = rmdp.initial_state();

    RegretTrace trace;
    trace.beta = cfg.beta ? *cfg.beta
                          : default_beta(H, sigma, cfg.episodes, static_cast<double>(F.size(0)),
                                         static_cast<double>(G.size(0)), cfg.delta);

    const auto star = robust_backward_induction(rmdp, sigma);
    const double v_star = star.v[0][static_cast<std::size_t>(s1)];
    std::vector<std::uint64_t> star_index;
    for (int h = 0; h < H; ++h) star_index.push_back(F.nearest_index(star.q[static_cast<std::size_t>(h)]));

    Rng rng(cfg.seed, "rfltv_rollout");
    ConfidenceState st = initial_confidence_state(F, trace.beta);
    double cum = 0.0, slack = 0.0;
    for (int k = 1; k <= cfg.episodes; ++k) {
        const auto sel = optimistic_select(st, F, G, sigma, cfg.semantics, s1);
        RegretRecord rec;
        rec.k = k;
        rec.v_star = v_star;
        rec.v_pik = robust_policy_evaluation(rmdp, sel.policy, sigma).v[0][static_cast<std::size_t>(s1)];
        rec.gap = v_star - rec.v_pik;
        cum += rec.gap;
        rec.cum_regret = cum;
        rec.survivors = st.survivor_counts();
        rec.beta_slack = slack;
        trace.records.push_back(std::move(rec));

        int s = s1;
        for (int h = 0; h < H; ++h) {
            const int a = sel.policy(h, s);
            const auto row = rmdp.kernel_row(h, s, a);
            const int next = static_cast<int>(rng.categorical(std::vector<double>(row.begin(), row.end())));
            st.data[static_cast<std::size_t>(h)].push_back({h, s, a, rmdp.reward(h, s, a), next});
            s = next;
        }

        // completeness slack of the grid tables nearest Q*
        slack = 0.0;
        for (int h = 0; h < H; ++h) {
            std::vector<double> v(static_cast<std::size_t>(S), 0.0);
            if (h + 1 < H) v = F.table(h + 1, star_index[static_cast<std::size_t>(h + 1)]).state_values();
            slack = std::max(slack, loss_gap(F, G, h, star_index[static_cast<std::size_t>(h)], v,
                                             st.data[static_cast<std::size_t>(h)], sigma));
        }
        st.beta = trace.beta + (cfg.inflate_beta_with_slack ? slack : 0.0);
        st = update_confidence_set(st, F, G, sigma, cfg.semantics);
    }
    return trace;
}

void write_regret_csv(std::ostream& out, const RegretTrace& trace, int horizon) {
    out << "k,v_star,v_pik,gap,cum_regret";
    for (int h = 1; h <= horizon; ++h) out << ",survivors_h" << h;
    out << ",beta_slack\n";
    for (const auto& r : trace.records) {
        out << r.k << ',' << fmt17(r.v_star) << ',' << fmt17(r.v_pik) << ',' << fmt17(r.gap) << ','
            << fmt17(r.cum_regret);
        for (auto c : r.survivors) out << ',' << c;
        out << ',' << fmt17(r.beta_slack) << '\n';
    }
}

double regret_exponent(const RegretTrace& trace) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : trace.records) {
        if (!(r.cum_regret > 1e-12)) continue;
        const double x = std::log(static_cast<double>(r.k)), y = std::log(r.cum_regret);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

} // namespace drrl
