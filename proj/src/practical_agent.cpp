#include "drrl/practical_agent.hpp"

#include "drrl/errors.hpp"
#include "drrl/format.hpp"
#include "drrl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace drrl {

void AgentConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
    if (buffer_capacity == 0 || batch_size == 0) throw ConfigError("buffer and batch sizes must be positive");
    if (!(lr_q > 0.0) || !(lr_g > 0.0)) throw ConfigError("learning rates must be positive");
    if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0))
        throw ConfigError("need 0 <= epsilon_end <= epsilon_start <= 1");
    if (epsilon_decay_episodes <= 0 || episodes <= 0 || updates_per_step < 0)
        throw ConfigError("episode counts must be positive");
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw ConfigError("sigma must lie in [0, 1]");
    if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
    if (hidden_q <= 0 || hidden_g <= 0 || !(g_max > 0.0)) throw ConfigError("network sizes must be positive");
}

double dual_term(double g, double v_next, double sigma) { return std::max(g - v_next, 0.0) - (1.0 - sigma) * g; }

double dual_loss_with_slack(std::span<const double> dual_terms, double beta) {
    if (dual_terms.empty()) return 0.0;
    double total = 0.0;
    for (double d : dual_terms) {
        const double r = std::max(std::abs(d) - beta, 0.0);
        total += r * r;
    }
    return total / static_cast<double>(dual_terms.size());
}

double td_target(double r, bool done, double gamma, double v_next, double dual_new) {
    return r + (done ? 0.0 : 1.0) * gamma * (v_next + dual_new);
}

double epsilon_for_episode(int episode, const AgentConfig& c) {
    const double frac = std::min(1.0, static_cast<double>(episode - 1) / c.epsilon_decay_episodes);
    return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * std::max(frac, 0.0);
}

AgentNetworks make_networks(const AgentConfig& c, int obs_dim, int num_actions) {
    Rng init(c.seed, "init");
    AgentNetworks n;
    n.q1 = Mlp(obs_dim, c.hidden_q, c.hidden_q, num_actions, OutputHead::linear(), init);
    n.q2 = Mlp(obs_dim, c.hidden_q, c.hidden_q, num_actions, OutputHead::linear(), init);
    n.g = Mlp(obs_dim, c.hidden_g, c.hidden_g, num_actions, OutputHead::sigmoid_scaled(c.g_max), init);
    n.q1_target = n.q1;
    n.q2_target = n.q2;
    n.g_target = n.g;
    return n;
}

namespace {

Eigen::MatrixXd column(const std::vector<double>& obs) {
    return Eigen::Map<const Eigen::MatrixXd>(obs.data(), static_cast<Eigen::Index>(obs.size()), 1);
}

int argmax_min(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2, Eigen::Index col) {
    int best = 0;
    double best_v = std::min(q1(0, col), q2(0, col));
    for (Eigen::Index a = 1; a < q1.rows(); ++a) {
        const double v = std::min(q1(a, col), q2(a, col));
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(a);
        }
    }
    return best;
}

} // namespace

int greedy_action(const AgentNetworks& nets, const std::vector<double>& obs) {
    const auto x = column(obs);
    return argmax_min(nets.q1.forward(x), nets.q2.forward(x), 0);
}

int select_action(const AgentNetworks& nets, const std::vector<double>& obs, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
    const bool explore = rng.uniform() < epsilon;
    const int random_action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(nets.q1.output_dim())));
    return explore ? random_action : greedy_action(nets, obs);
}

AgentOptimizers make_optimizers(const AgentNetworks& nets, const AgentConfig& c) {
    return {Adam(nets.q1.num_params(), c.lr_q), Adam(nets.q2.num_params(), c.lr_q), Adam(nets.g.num_params(), c.lr_g)};
}

UpdateStats update_step(AgentNetworks& nets, AgentOptimizers& opt, const ReplayBatch& batch, const AgentConfig& c) {
    const Eigen::Index B = batch.s.cols();
    const double inv_b = 1.0 / static_cast<double>(B);
    UpdateStats stats;

    // v_next(s') = max_a' min(Q1bar, Q2bar)(s', a')
    const Eigen::MatrixXd tq1 = nets.q1_target.forward(batch.s_next);
    const Eigen::MatrixXd tq2 = nets.q2_target.forward(batch.s_next);
    Eigen::VectorXd v_next(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const int a = argmax_min(tq1, tq2, j);
        v_next[j] = std::min(tq1(a, j), tq2(a, j));
    }

    Eigen::VectorXd dual_new = Eigen::VectorXd::Zero(B);
    if (c.use_dual) {
        MlpTape tape;
        const Eigen::MatrixXd g = nets.g.forward(batch.s, tape);
        std::vector<double> terms(static_cast<std::size_t>(B));
        Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(g.rows(), B);
        for (Eigen::Index j = 0; j < B; ++j) {
            const int a = batch.a[static_cast<std::size_t>(j)];
            const double gv = g(a, j);
            const double d = dual_term(gv, v_next[j], c.sigma);
            terms[static_cast<std::size_t>(j)] = d;
            const double excess = std::abs(d) - c.beta;
            if (excess > 0.0) {
                const double dd_dg = (gv > v_next[j] ? 1.0 : 0.0) - (1.0 - c.sigma);
                d_out(a, j) = 2.0 * excess * (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) * dd_dg * inv_b;
            }
        }
        stats.loss_g = dual_loss_with_slack(terms, c.beta);
        if (!std::isfinite(stats.loss_g)) throw NumericFault("non-finite dual loss");
        opt.g.step(nets.g, nets.g.backward(tape, d_out));

        const Mlp& g_used = c.dual_target ? nets.g_target : nets.g;
        const Eigen::MatrixXd g_new = g_used.forward(batch.s);
        for (Eigen::Index j = 0; j < B; ++j)
            dual_new[j] = dual_term(g_new(batch.a[static_cast<std::size_t>(j)], j), v_next[j], c.sigma);
    }

    Eigen::VectorXd y(B);
    for (Eigen::Index j = 0; j < B; ++j)
        y[j] = td_target(batch.r[j], batch.done[j] != 0.0, c.gamma, v_next[j], dual_new[j]);

    double loss_q = 0.0;
    auto q_step = [&](Mlp& net, Adam& adam) {
        MlpTape tape;
        const Eigen::MatrixXd q = net.forward(batch.s, tape);
        Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(q.rows(), B);
        for (Eigen::Index j = 0; j < B; ++j) {
            const int a = batch.a[static_cast<std::size_t>(j)];
            const double e = q(a, j) - y[j];
            loss_q += e * e * inv_b;
            d_out(a, j) = 2.0 * e * inv_b;
        }
        adam.step(net, net.backward(tape, d_out));
    };
    q_step(nets.q1, opt.q1);
    q_step(nets.q2, opt.q2);
    if (!std::isfinite(loss_q)) throw NumericFault("non-finite Q loss");
    stats.loss_q = loss_q;

    soft_update(nets.q1_target, nets.q1, c.tau);
    soft_update(nets.q2_target, nets.q2, c.tau);
    if (c.use_dual && c.dual_target) soft_update(nets.g_target, nets.g, c.tau);
    return stats;
}

TrainResult train(const AgentConfig& c, const CartPolePhysics& physics) {
    c.validate();
    CartPoleEnv env(physics);
    TrainResult out;
    out.nets = make_networks(c, env.obs_dim(), env.num_actions());
    auto opt = make_optimizers(out.nets, c);
    ReplayBuffer buffer(c.buffer_capacity, env.obs_dim());
    Rng env_seeds(c.seed, "train_env");
    Rng explore(c.seed, "exploration");
    Rng sampler(c.seed, "buffer");

    for (int k = 1; k <= c.episodes; ++k) {
        const double eps = epsilon_for_episode(k, c);
        auto obs = env.reset(env_seeds.next_u64());
        double ret = 0.0, lq = 0.0, lg = 0.0;
        int updates = 0;
        for (;;) {
            const int a = select_action(out.nets, obs, eps, explore);
            const auto st = env.step(a);
            ++out.env_steps;
            ret += st.reward;
            // time-limit truncation still bootstraps
            buffer.push(obs, a, st.reward, st.obs, st.done);
            obs = st.obs;
            if (buffer.size() >= c.batch_size) {
                for (int u = 0; u < c.updates_per_step; ++u) {
                    const auto s = update_step(out.nets, opt, buffer.sample(c.batch_size, sampler), c);
                    lq += s.loss_q;
                    lg += s.loss_g;
                    ++updates;
                    ++out.gradient_steps;
                }
            }
            if (st.done || st.truncated) break;
        }
        out.curve.push_back({k, ret, eps, updates ? lq / updates : 0.0, updates ? lg / updates : 0.0});
    }
    return out;
}

std::uint64_t eval_episode_seed(std::uint64_t seed, int episode) {
    return 1000000ULL + 1000ULL * seed + static_cast<std::uint64_t>(episode);
}

std::vector<double> evaluate_returns(const AgentNetworks& nets, const PerturbationSpec& p, int episodes,
                                     std::uint64_t seed, const CartPolePhysics& physics) {
    if (episodes <= 0) throw DomainError("episodes must be positive");
    CartPoleEnv env(physics, p);
    std::vector<double> returns;
    for (int e = 0; e < episodes; ++e) {
        auto obs = env.reset(eval_episode_seed(seed, e));
        double ret = 0.0;
        for (;;) {
            const auto st = env.step(greedy_action(nets, obs));
            ret += st.reward;
            obs = st.obs;
            if (st.done || st.truncated) break;
        }
        returns.push_back(ret);
    }
    return returns;
}

EvalRecord make_eval_record(const PerturbationSpec& p, double sigma, double beta, std::string seed,
                            std::vector<double> returns) {
    EvalRecord r;
    r.kind = to_string(p.kind);
    r.level = p.level;
    r.sigma = sigma;
    r.beta = beta;
    r.seed = std::move(seed);
    const auto s = summarize(returns);
    r.mean_return = s.mean;
    r.ci_low = s.ci_low;
    r.ci_high = s.ci_high;
    r.n_episodes = s.n;
    r.returns = std::move(returns);
    return r;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& curve) {
    out << "episode,return,epsilon,loss_q,loss_g\n";
    for (const auto& r : curve)
        out << r.episode << ',' << fmt17(r.ret) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.loss_q) << ','
            << fmt17(r.loss_g) << '\n';
}

void write_eval_header(std::ostream& out) {
    out << "kind,level,sigma,beta,seed,mean_return,ci_low,ci_high,n_episodes\n";
}

void write_eval_row(std::ostream& out, const EvalRecord& r) {
    out << r.kind << ',' << fmt17(r.level) << ',' << fmt17(r.sigma) << ',' << fmt17(r.beta) << ',' << r.seed << ','
        << fmt17(r.mean_return) << ',' << fmt17(r.ci_low) << ',' << fmt17(r.ci_high) << ',' << r.n_episodes << '\n';
}

void save_networks(std::ostream& out, const AgentNetworks& n) {
    for (const Mlp* m : {&n.q1, &n.q2, &n.q1_target, &n.q2_target, &n.g, &n.g_target}) m->save(out);
}

AgentNetworks load_networks(std::istream& in) {
    AgentNetworks n;
    for (Mlp* m : {&n.q1, &n.q2, &n.q1_target, &n.q2_target, &n.g, &n.g_target}) *m = Mlp::load(in);
    return n;
}

} // namespace drrl
