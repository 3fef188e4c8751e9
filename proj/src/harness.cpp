#include "drrl/harness.hpp"

#include "drrl/errors.hpp"
#include "drrl/format.hpp"
#include "drrl/linear_rmdp.hpp"
#include "drrl/rmdp_io.hpp"
#include "drrl/stats.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace drrl::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::plan: return "plan";
    case ExperimentKind::coverability: return "coverability";
    case ExperimentKind::rfltv_exact: return "rfltv_exact";
    case ExperimentKind::practical_train: return "practical_train";
    case ExperimentKind::practical_eval: return "practical_eval";
    case ExperimentKind::dual_property_suite: return "dual_property_suite";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto k : {ExperimentKind::plan, ExperimentKind::coverability, ExperimentKind::rfltv_exact,
                   ExperimentKind::practical_train, ExperimentKind::practical_eval,
                   ExperimentKind::dual_property_suite})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string command_for(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::plan: return "plan";
    case ExperimentKind::coverability: return "coverability";
    case ExperimentKind::rfltv_exact: return "rfltv-exact";
    case ExperimentKind::practical_train: return "train";
    case ExperimentKind::practical_eval: return "eval";
    case ExperimentKind::dual_property_suite: return "selftest";
    }
    return "?";
}

namespace {

std::string fmtg(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Reads keys from one JSON object and remembers which were consumed.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    const json& at(const std::string& k) {
        if (!j_.contains(k)) throw ConfigError(path(k) + ": missing required key");
        used_.insert(k);
        return j_.at(k);
    }

    double number(const std::string& k, double def) {
        if (!has(k)) return def;
        const auto& v = at(k);
        if (!v.is_number()) throw ConfigError(path(k) + ": expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string& k, std::int64_t def) {
        if (!has(k)) return def;
        const auto& v = at(k);
        if (!v.is_number_integer()) throw ConfigError(path(k) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& k, bool def) {
        if (!has(k)) return def;
        const auto& v = at(k);
        if (!v.is_boolean()) throw ConfigError(path(k) + ": expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& k, const std::string& def) {
        if (!has(k)) return def;
        const auto& v = at(k);
        if (!v.is_string()) throw ConfigError(path(k) + ": expected a string");
        return v.get<std::string>();
    }

    std::string path(const std::string& k) const { return where_ + "." + k; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + ": expected a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

int small_int(Fields& f, const std::string& k, int def, int lo, int hi) {
    const auto v = f.integer(k, def);
    require(v >= lo && v <= hi, f.path(k) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

double bounded(Fields& f, const std::string& k, double def, double lo, double hi) {
    const double v = f.number(k, def);
    require(v >= lo && v <= hi, f.path(k) + ": must lie in [" + fmtg(lo) + ", " + fmtg(hi) + "]");
    return v;
}

EnvironmentConfig parse_environment(const json& j, const std::string& base_dir) {
    Fields f(j, "environment");
    EnvironmentConfig e;
    e.type = f.text("type", "");
    constexpr int kMaxH = 1000;
    if (e.type == "fail_chain") {
        e.horizon = small_int(f, "horizon", 2, 1, kMaxH);
    } else if (e.type == "risky_chain") {
        e.horizon = small_int(f, "horizon", 2, 1, kMaxH);
        e.safe_reward = bounded(f, "safe_reward", 0.5, 0.0, 1.0);
        e.risky_reward = bounded(f, "risky_reward", 1.0, 0.0, 1.0);
        e.hazard = bounded(f, "hazard", 0.2, 0.0, 1.0);
    } else if (e.type == "gridworld") {
        e.grid.width = small_int(f, "width", 3, 1, 50);
        e.grid.height = small_int(f, "height", 3, 1, 50);
        e.grid.hazard_prob = bounded(f, "hazard_prob", 0.1, 0.0, 1.0);
        e.grid.horizon = small_int(f, "horizon", 5, 1, kMaxH);
        e.grid.seed = static_cast<std::uint64_t>(f.integer("seed", 0));
        if (f.has("fail_cells")) {
            const auto& cells = f.at("fail_cells");
            require(cells.is_array(), "environment.fail_cells: expected a list of integers");
            e.grid.fail_cells.clear();
            for (const auto& c : cells) {
                require(c.is_number_integer(), "environment.fail_cells: expected a list of integers");
                e.grid.fail_cells.push_back(c.get<int>());
            }
        }
        e.horizon = e.grid.horizon;
    } else if (e.type == "random") {
        e.states = small_int(f, "states", 3, 1, 1000);
        e.actions = small_int(f, "actions", 2, 1, 100);
        e.horizon = small_int(f, "horizon", 3, 1, kMaxH);
        e.num_fail = small_int(f, "num_fail", 1, 0, e.states - 1);
        e.seed = static_cast<std::uint64_t>(f.integer("seed", 0));
    } else if (e.type == "linear") {
        e.dim = small_int(f, "dim", 2, 1, 64);
        e.states = small_int(f, "states", 3, 1, 1000);
        e.actions = small_int(f, "actions", 2, 1, 100);
        e.horizon = small_int(f, "horizon", 3, 1, kMaxH);
        e.seed = static_cast<std::uint64_t>(f.integer("seed", 0));
    } else if (e.type == "file") {
        const auto p = f.text("path", "");
        require(!p.empty(), "environment.path: missing model file");
        const fs::path full = fs::path(p).is_absolute() ? fs::path(p) : fs::path(base_dir) / p;
        require(fs::exists(full), "environment.path: file not found: " + full.string());
        e.path = full.string();
    } else if (e.type == "cartpole") {
        if (f.has("physics")) {
            Fields p(f.at("physics"), "environment.physics");
            auto& ph = e.physics;
            ph.gravity = p.number("gravity", ph.gravity);
            ph.masscart = p.number("masscart", ph.masscart);
            ph.masspole = p.number("masspole", ph.masspole);
            ph.half_length = p.number("half_length", ph.half_length);
            ph.force_mag = p.number("force_mag", ph.force_mag);
            ph.dt = p.number("dt", ph.dt);
            ph.theta_threshold_deg = p.number("theta_threshold_deg", ph.theta_threshold_deg);
            ph.x_threshold = p.number("x_threshold", ph.x_threshold);
            ph.max_steps = small_int(p, "max_steps", ph.max_steps, 1, 1000000);
            p.finish();
        }
        try {
            e.physics.validate();
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("environment.physics: ") + err.what());
        }
    } else {
        throw ConfigError("environment.type: unknown environment '" + e.type + "'");
    }
    f.finish();
    return e;
}

std::vector<double> parse_sigmas(Fields& f) {
    require(!(f.has("sigma") && f.has("sigmas")), "algorithm: give either sigma or sigmas");
    std::vector<double> out;
    if (f.has("sigmas")) out = number_list(f.at("sigmas"), f.path("sigmas"));
    else out = {f.number("sigma", 0.3)};
    require(!out.empty(), f.path("sigmas") + ": empty list");
    for (double s : out) require(s >= 0.0 && std::isfinite(s), "algorithm: sigma must be finite and >= 0");
    return out;
}

AgentEntry parse_agent_entry(const json& j, const std::string& where) {
    Fields f(j, where);
    AgentEntry a;
    a.sigma = bounded(f, "sigma", 0.0, 0.0, 1.0);
    a.beta = bounded(f, "beta", 0.0, 0.0, 1e6);
    a.use_dual = f.boolean("use_dual", true);
    f.finish();
    return a;
}

void parse_agent_template(const json& j, AgentConfig& c) {
    Fields f(j, "algorithm.agent");
    c.gamma = bounded(f, "gamma", c.gamma, 0.0, 1.0);
    c.tau = bounded(f, "tau", c.tau, 0.0, 1.0);
    c.buffer_capacity = static_cast<std::size_t>(small_int(f, "buffer_capacity", static_cast<int>(c.buffer_capacity), 1, 100000000));
    c.batch_size = static_cast<std::size_t>(small_int(f, "batch_size", static_cast<int>(c.batch_size), 1, 1000000));
    c.lr_q = bounded(f, "lr_q", c.lr_q, 1e-12, 1.0);
    c.lr_g = bounded(f, "lr_g", c.lr_g, 1e-12, 1.0);
    c.epsilon_start = bounded(f, "epsilon_start", c.epsilon_start, 0.0, 1.0);
    c.epsilon_end = bounded(f, "epsilon_end", c.epsilon_end, 0.0, 1.0);
    c.epsilon_decay_episodes = small_int(f, "epsilon_decay_episodes", c.epsilon_decay_episodes, 1, 10000000);
    c.episodes = small_int(f, "episodes", c.episodes, 1, 10000000);
    c.updates_per_step = small_int(f, "updates_per_step", c.updates_per_step, 0, 1000);
    c.hidden_q = small_int(f, "hidden_q", c.hidden_q, 1, 100000);
    c.hidden_g = small_int(f, "hidden_g", c.hidden_g, 1, 100000);
    c.g_max = bounded(f, "g_max", c.g_max, 1e-12, 1e12);
    c.dual_target = f.boolean("dual_target", c.dual_target);
    f.finish();
    require(c.epsilon_end <= c.epsilon_start, "algorithm.agent: need epsilon_end <= epsilon_start");
}

std::vector<PerturbationSpec> parse_perturbations(const json& j) {
    require(j.is_array(), "evaluation.perturbations: expected a list");
    const auto grids = perturbation_grids();
    std::vector<PerturbationSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "evaluation.perturbations[" + std::to_string(i) + "]";
        Fields f(j[i], where);
        const auto kind_name = f.text("kind", "");
        PerturbationKind kind;
        try {
            kind = perturbation_kind_from_string(kind_name);
        } catch (const std::exception&) {
            throw ConfigError(where + ".kind: unknown perturbation '" + kind_name + "'");
        }
        std::vector<double> levels;
        if (kind == PerturbationKind::none) {
            require(!f.has("levels"), where + ": the nominal entry takes no levels");
            levels = {0.0};
        } else {
            const auto& lv = f.at("levels");
            if (lv.is_string()) {
                require(lv.get<std::string>() == "grid", where + ".levels: expected a list or \"grid\"");
                levels = grids.at(kind_name);
            } else {
                levels = number_list(lv, where + ".levels");
            }
        }
        f.finish();
        for (double l : levels) {
            PerturbationSpec p{kind, l};
            try {
                p.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(where + ": " + e.what());
            }
            out.push_back(p);
        }
    }
    return out;
}

std::vector<ComparisonSpec> parse_comparisons(const json& j) {
    require(j.is_array(), "comparisons: expected a list");
    std::vector<ComparisonSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "comparisons[" + std::to_string(i) + "]";
        Fields f(j[i], where);
        ComparisonSpec c;
        const auto kind_name = f.text("kind", "");
        try {
            c.perturbation.kind = perturbation_kind_from_string(kind_name);
        } catch (const std::exception&) {
            throw ConfigError(where + ".kind: unknown perturbation '" + kind_name + "'");
        }
        c.perturbation.level = f.number("level", 0.0);
        c.robust = parse_agent_entry(f.at("robust"), where + ".robust");
        c.baseline = parse_agent_entry(f.at("baseline"), where + ".baseline");
        f.finish();
        out.push_back(c);
    }
    return out;
}

} // namespace

TabularRMDP make_tabular(const EnvironmentConfig& e) {
    if (e.type == "fail_chain") return make_fail_chain(e.horizon);
    if (e.type == "risky_chain") return make_risky_chain(e.horizon, e.safe_reward, e.risky_reward, e.hazard);
    if (e.type == "gridworld") return make_gridworld(e.grid);
    if (e.type == "random") return make_random_rmdp(e.states, e.actions, e.horizon, e.num_fail, e.seed);
    if (e.type == "linear") return make_linear_rmdp(e.dim, e.states, e.actions, e.horizon, e.seed).tabular;
    if (e.type == "file") return load_rmdp(e.path);
    throw ConfigError("environment '" + e.type + "' is not tabular");
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
    Fields top(doc, "config");
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(top.text("experiment", ""));

    if (top.has("seeds")) {
        const auto& sj = top.at("seeds");
        require(sj.is_array(), "config.seeds: expected a list of non-negative integers");
        c.seeds.clear();
        for (const auto& s : sj) {
            require(s.is_number_integer() && s.get<std::int64_t>() >= 0,
                    "config.seeds: expected a list of non-negative integers");
            c.seeds.push_back(s.get<std::uint64_t>());
        }
    }
    require(!c.seeds.empty(), "config.seeds: empty seed list");
    c.output_dir = top.text("output_dir", "");

    const bool needs_env = c.kind != ExperimentKind::dual_property_suite;
    if (needs_env) c.env = parse_environment(top.at("environment"), base_dir);
    else require(!top.has("environment"), "config.environment: not used by dual_property_suite");

    const bool tabular_kind = c.kind == ExperimentKind::plan || c.kind == ExperimentKind::coverability ||
                              c.kind == ExperimentKind::rfltv_exact;
    const bool agent_kind = c.kind == ExperimentKind::practical_train || c.kind == ExperimentKind::practical_eval;
    if (tabular_kind) require(c.env.is_tabular(), "environment: " + to_string(c.kind) + " needs a tabular model");
    if (agent_kind) require(c.env.type == "cartpole", "environment: " + to_string(c.kind) + " needs cartpole");

    const json empty = json::object();
    Fields alg(top.has("algorithm") ? top.at("algorithm") : empty, "algorithm");
    switch (c.kind) {
    case ExperimentKind::plan: c.sigmas = parse_sigmas(alg); break;
    case ExperimentKind::coverability:
        c.sigmas = parse_sigmas(alg);
        c.policy_budget = bounded(alg, "policy_budget", c.policy_budget, 1.0, 1e12);
        break;
    case ExperimentKind::rfltv_exact: {
        auto& r = c.rfltv;
        r.sigma = bounded(alg, "sigma", r.sigma, 0.0, 1e6);
        if (alg.has("beta")) {
            const auto& b = alg.at("beta");
            if (b.is_string()) {
                require(b.get<std::string>() == "inf", "algorithm.beta: expected a number or \"inf\"");
                r.beta = std::numeric_limits<double>::infinity();
            } else {
                require(b.is_number() && b.get<double>() >= 0.0, "algorithm.beta: expected a number >= 0");
                r.beta = b.get<double>();
            }
        }
        r.delta = bounded(alg, "delta", r.delta, 1e-300, 1.0);
        r.episodes = small_int(alg, "episodes", r.episodes, 1, 10000000);
        r.delta_f = bounded(alg, "delta_f", r.delta_f, 1e-9, 1e9);
        r.delta_g = bounded(alg, "delta_g", r.delta_g, 1e-9, 1e9);
        try {
            r.semantics = confidence_semantics_from_string(alg.text("semantics", to_string(r.semantics)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("algorithm.semantics: ") + e.what());
        }
        r.inflate_beta_with_slack = alg.boolean("inflate_beta_with_slack", r.inflate_beta_with_slack);
        r.class_budget = bounded(alg, "class_budget", r.class_budget, 1.0, 1e12);
        break;
    }
    case ExperimentKind::practical_train:
    case ExperimentKind::practical_eval: {
        if (c.kind == ExperimentKind::practical_train) {
            if (alg.has("agent")) parse_agent_template(alg.at("agent"), c.agent);
        } else {
            const auto dir = alg.text("checkpoint_dir", "");
            require(!dir.empty(), "algorithm.checkpoint_dir: missing");
            const fs::path full = fs::path(dir).is_absolute() ? fs::path(dir) : fs::path(base_dir) / dir;
            require(fs::is_directory(full), "algorithm.checkpoint_dir: directory not found: " + full.string());
            c.checkpoint_dir = full.string();
        }
        const auto& list = alg.at("agents");
        require(list.is_array() && !list.empty(), "algorithm.agents: expected a non-empty list");
        for (std::size_t i = 0; i < list.size(); ++i)
            c.agents.push_back(parse_agent_entry(list[i], "algorithm.agents[" + std::to_string(i) + "]"));
        break;
    }
    case ExperimentKind::dual_property_suite:
        c.instances = small_int(alg, "instances", c.instances, 1, 100000000);
        c.max_states = small_int(alg, "max_states", c.max_states, 1, 100000);
        break;
    }
    alg.finish();

    if (top.has("evaluation")) {
        require(agent_kind, "config.evaluation: only used by practical_train and practical_eval");
        Fields ev(top.at("evaluation"), "evaluation");
        c.eval_episodes = small_int(ev, "episodes", c.eval_episodes, 1, 10000000);
        c.perturbations = parse_perturbations(ev.at("perturbations"));
        ev.finish();
    }
    require(c.kind != ExperimentKind::practical_eval || !c.perturbations.empty(),
            "config.evaluation: practical_eval needs a perturbation list");
    if (top.has("comparisons")) {
        require(agent_kind, "config.comparisons: only used by practical_train and practical_eval");
        c.comparisons = parse_comparisons(top.at("comparisons"));
    }
    top.finish();

    if (c.env.is_tabular() && needs_env) {
        try {
            (void)make_tabular(c.env);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("environment: ") + e.what());
        }
    }
    return c;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string canonical_hash(const json& doc) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(doc.dump());
    return os.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const BudgetExceeded*>(&e)) return kExitBudget;
    if (dynamic_cast<const NumericFault*>(&e)) return kExitNumeric;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitConfig;
    return kExitFailure;
}

namespace {

struct Cell {
    Cell(std::string n, std::uint64_t s = 0, std::vector<std::string> st = {})
        : name(std::move(n)), seed(s), streams(std::move(st)) {}

    std::string name;
    std::uint64_t seed = 0;
    std::vector<std::string> streams;
    std::vector<std::string> outputs; ///< relative to the run directory
    std::string status = "ok";
    std::string error;
    int code = kExitOk;
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& p) {
    out.close();
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

// Work-stealing over cell indices; each body catches its own errors.
template <class F>
void for_each_cell(std::size_t n, int jobs, F&& body) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

template <class F>
void guarded(Cell& cell, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        cell.status = "failed";
        cell.error = e.what();
        cell.code = exit_code_for(e);
    }
}

struct RunContext {
    const ExperimentConfig& cfg;
    fs::path out;
    const RunOptions& opt;
    std::ostream& log;
    std::vector<Cell> cells;

    std::uint64_t seed(std::size_t i) const {
        const auto s = static_cast<std::int64_t>(cfg.seeds[i]) + opt.seed_offset;
        if (s < 0) throw ConfigError("seed offset makes seed " + std::to_string(cfg.seeds[i]) + " negative");
        return static_cast<std::uint64_t>(s);
    }
};

std::string cell_dir(const std::string& name) { return "cells/" + name; }

// --- plan -------------------------------------------------------------------

void run_plan(RunContext& ctx) {
    const auto model = make_tabular(ctx.cfg.env);
    {
        const auto p = ctx.out / "model.json";
        auto out = open_out(p);
        out << rmdp_to_json(model).dump(1) << '\n';
        close_out(out, p);
    }
    const int S = model.num_states(), A = model.num_actions(), H = model.horizon();
    for (double sigma : ctx.cfg.sigmas) ctx.cells.push_back({"sigma_" + fmtg(sigma)});
    for_each_cell(ctx.cells.size(), ctx.opt.jobs, [&](std::size_t i) {
        Cell& cell = ctx.cells[i];
        guarded(cell, [&] {
            const UncertaintyRadius sigma(ctx.cfg.sigmas[i]);
            const auto plan = robust_backward_induction(model, sigma);
            const auto worst = worst_kernel_for_policy(model, plan.policy, sigma);
            const fs::path dir = ctx.out / cell_dir(cell.name);
            auto emit = [&](const std::string& file, auto&& write) {
                const auto p = dir / file;
                auto out = open_out(p);
                write(out);
                close_out(out, p);
                cell.outputs.push_back(cell_dir(cell.name) + "/" + file);
            };
            emit("values.csv", [&](std::ostream& o) {
                o << "h,s,value\n";
                for (int h = 0; h <= H; ++h)
                    for (int s = 0; s < S; ++s) o << h << ',' << s << ',' << fmt17(plan.v[h][s]) << '\n';
            });
            emit("q.csv", [&](std::ostream& o) {
                o << "h,s,a,q\n";
                for (int h = 0; h < H; ++h)
                    for (int s = 0; s < S; ++s)
                        for (int a = 0; a < A; ++a) o << h << ',' << s << ',' << a << ',' << fmt17(plan.q[h](s, a)) << '\n';
            });
            emit("policy.csv", [&](std::ostream& o) {
                o << "h,s,action\n";
                for (int h = 0; h < H; ++h)
                    for (int s = 0; s < S; ++s) o << h << ',' << s << ',' << plan.policy(h, s) << '\n';
            });
            emit("worst_kernel.csv", [&](std::ostream& o) {
                o << "h,s,a,next_state,prob\n";
                for (int h = 0; h < H; ++h)
                    for (int s = 0; s < S; ++s)
                        for (int a = 0; a < A; ++a) {
                            const auto row = worst.row(h, s, a);
                            for (int n = 0; n < S; ++n)
                                o << h << ',' << s << ',' << a << ',' << n << ',' << fmt17(row[n]) << '\n';
                        }
            });
        });
    });
}

// --- coverability -----------------------------------------------------------

void run_coverability(RunContext& ctx) {
    const bool linear = ctx.cfg.env.type == "linear";
    std::optional<LinearInstance> inst;
    if (linear) {
        const auto& e = ctx.cfg.env;
        inst = make_linear_rmdp(e.dim, e.states, e.actions, e.horizon, e.seed);
    }
    const auto model = linear ? inst->tabular : make_tabular(ctx.cfg.env);
    for (double sigma : ctx.cfg.sigmas) ctx.cells.push_back({"sigma_" + fmtg(sigma)});
    for_each_cell(ctx.cells.size(), ctx.opt.jobs, [&](std::size_t i) {
        Cell& cell = ctx.cells[i];
        guarded(cell, [&] {
            const double sigma = ctx.cfg.sigmas[i];
            const auto rep = robust_coverability(model, UncertaintyRadius(sigma), ctx.cfg.policy_budget, 1);
            auto doc = to_json(rep);
            doc["sigma"] = sigma;
            if (linear) {
                const double bound = static_cast<double>(model.num_actions()) * inst->linear.dim();
                doc["linear_bound"] = bound;
                doc["linear_bound_holds"] = !rep.infinite && rep.c_rcov <= bound + 1e-9;
            }
            const fs::path dir = ctx.out / cell_dir(cell.name);
            {
                const auto p = dir / "coverability.json";
                auto out = open_out(p);
                out << doc.dump(1) << '\n';
                close_out(out, p);
                cell.outputs.push_back(cell_dir(cell.name) + "/coverability.json");
            }
            const auto p = dir / "visitation.csv";
            auto out = open_out(p);
            out << "h,c_cv\n";
            for (std::size_t h = 0; h < rep.per_step.size(); ++h) out << h << ',' << fmt17(rep.per_step[h]) << '\n';
            close_out(out, p);
            cell.outputs.push_back(cell_dir(cell.name) + "/visitation.csv");
        });
    });
}

// --- rfltv_exact ------------------------------------------------------------

void run_rfltv(RunContext& ctx) {
    const auto model = make_tabular(ctx.cfg.env);
    struct Result {
        double beta = 0.0;
        double cum = 0.0;
        double exponent = 0.0;
    };
    std::vector<Result> results(ctx.cfg.seeds.size());
    for (std::size_t i = 0; i < ctx.cfg.seeds.size(); ++i)
        ctx.cells.push_back({"seed_" + std::to_string(ctx.seed(i)), ctx.seed(i), {"rfltv_rollout"}});
    for_each_cell(ctx.cells.size(), ctx.opt.jobs, [&](std::size_t i) {
        Cell& cell = ctx.cells[i];
        guarded(cell, [&] {
            RfltvConfig rc = ctx.cfg.rfltv;
            rc.seed = cell.seed;
            const auto trace = run_rfltv_exact(model, rc);
            const auto p = ctx.out / cell_dir(cell.name) / "regret.csv";
            auto out = open_out(p);
            write_regret_csv(out, trace, model.horizon());
            close_out(out, p);
            cell.outputs.push_back(cell_dir(cell.name) + "/regret.csv");
            results[i] = {trace.beta, trace.records.empty() ? 0.0 : trace.records.back().cum_regret,
                          regret_exponent(trace)};
        });
    });
    const auto p = ctx.out / "regret_summary.csv";
    auto out = open_out(p);
    out << "seed,beta,episodes,cum_regret,exponent\n";
    for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
        if (ctx.cells[i].status != "ok") continue;
        out << ctx.cells[i].seed << ',' << fmt17(results[i].beta) << ',' << ctx.cfg.rfltv.episodes << ','
            << fmt17(results[i].cum) << ',' << fmt17(results[i].exponent) << '\n';
        ctx.log << ctx.cells[i].name << ": beta " << fmtg(results[i].beta) << ", cumulative regret "
                << fmtg(results[i].cum) << ", exponent " << fmtg(results[i].exponent) << '\n';
    }
    close_out(out, p);
}

// --- dual_property_suite ----------------------------------------------------

void run_dual_suite(RunContext& ctx) {
    struct Result {
        double max_diff = 0.0;
    };
    std::vector<Result> results(ctx.cfg.seeds.size());
    for (std::size_t i = 0; i < ctx.cfg.seeds.size(); ++i)
        ctx.cells.push_back({"seed_" + std::to_string(ctx.seed(i)), ctx.seed(i), {"dual_suite"}});
    for_each_cell(ctx.cells.size(), ctx.opt.jobs, [&](std::size_t i) {
        Cell& cell = ctx.cells[i];
        guarded(cell, [&] {
            Rng rng(cell.seed, "dual_suite");
            const auto p = ctx.out / cell_dir(cell.name) / "dual_suite.csv";
            auto out = open_out(p);
            out << "instance,states,sigma,dual_value,ball_value,abs_diff\n";
            double worst = 0.0;
            for (int k = 0; k < ctx.cfg.instances; ++k) {
                const int S = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(ctx.cfg.max_states)));
                const double sigma = static_cast<double>(k % 11) / 10.0;
                auto probs = rng.simplex(static_cast<std::size_t>(S));
                std::vector<double> values(static_cast<std::size_t>(S));
                for (auto& v : values) v = rng.uniform(0.0, 5.0);
                const double dual = tv_dual_value(probs, values, UncertaintyRadius(sigma));
                probs.push_back(0.0);
                values.push_back(0.0);
                const double ball = tv_inf_expectation_ball(probs, values, UncertaintyRadius(sigma)).value;
                const double diff = std::abs(dual - ball);
                worst = std::max(worst, diff);
                out << k << ',' << S << ',' << fmt17(sigma) << ',' << fmt17(dual) << ',' << fmt17(ball) << ','
                    << fmt17(diff) << '\n';
            }
            close_out(out, p);
            cell.outputs.push_back(cell_dir(cell.name) + "/dual_suite.csv");
            results[i].max_diff = worst;
        });
    });
    const auto p = ctx.out / "dual_suite_summary.csv";
    auto out = open_out(p);
    out << "seed,instances,max_abs_diff,pass\n";
    for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
        if (ctx.cells[i].status != "ok") continue;
        const bool pass = results[i].max_diff <= 1e-10;
        out << ctx.cells[i].seed << ',' << ctx.cfg.instances << ',' << fmt17(results[i].max_diff) << ','
            << (pass ? 1 : 0) << '\n';
        ctx.log << ctx.cells[i].name << ": max |dual - ball| = " << results[i].max_diff << (pass ? " ok" : " FAIL")
                << '\n';
        if (!pass) {
            ctx.cells[i].status = "failed";
            ctx.cells[i].error = "dual value differs from the ball infimum";
            ctx.cells[i].code = kExitFailure;
        }
    }
    close_out(out, p);
}

// --- practical agent --------------------------------------------------------

std::string agent_cell_name(const AgentEntry& a, std::uint64_t seed) {
    return a.variant() + "_sigma" + fmtg(a.sigma) + "_beta" + fmtg(a.beta) + "_seed" + std::to_string(seed);
}

json comparisons_json(const std::vector<ComparisonSpec>& cs) {
    json arr = json::array();
    auto entry = [](const AgentEntry& a) { return json{{"sigma", a.sigma}, {"beta", a.beta}, {"use_dual", a.use_dual}}; };
    for (const auto& c : cs)
        arr.push_back({{"kind", to_string(c.perturbation.kind)},
                       {"level", c.perturbation.level},
                       {"robust", entry(c.robust)},
                       {"baseline", entry(c.baseline)}});
    return arr;
}

void write_eval_outputs(RunContext& ctx, const std::vector<std::vector<std::vector<double>>>& returns,
                        std::size_t n_seeds) {
    const auto& cfg = ctx.cfg;
    {
        const auto p = ctx.out / "eval_returns.csv";
        auto out = open_out(p);
        out << "variant,kind,level,sigma,beta,seed,episode,return\n";
        for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
            if (ctx.cells[i].status != "ok") continue;
            const auto& a = cfg.agents[i / n_seeds];
            for (std::size_t j = 0; j < cfg.perturbations.size(); ++j)
                for (std::size_t e = 0; e < returns[i][j].size(); ++e)
                    out << a.variant() << ',' << to_string(cfg.perturbations[j].kind) << ','
                        << fmt17(cfg.perturbations[j].level) << ',' << fmt17(a.sigma) << ',' << fmt17(a.beta) << ','
                        << ctx.cells[i].seed << ',' << e << ',' << fmt17(returns[i][j][e]) << '\n';
        }
        close_out(out, p);
    }
    std::set<std::string> variants;
    for (const auto& a : cfg.agents) variants.insert(a.variant());
    for (const auto& v : variants) {
        const auto p = ctx.out / ("eval_" + v + ".csv");
        auto out = open_out(p);
        write_eval_header(out);
        for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai) {
            const auto& a = cfg.agents[ai];
            if (a.variant() != v) continue;
            for (std::size_t j = 0; j < cfg.perturbations.size(); ++j) {
                std::vector<double> pooled;
                for (std::size_t si = 0; si < n_seeds; ++si) {
                    const std::size_t i = ai * n_seeds + si;
                    if (ctx.cells[i].status != "ok") continue;
                    const auto& r = returns[i][j];
                    pooled.insert(pooled.end(), r.begin(), r.end());
                    write_eval_row(out, make_eval_record(cfg.perturbations[j], a.sigma, a.beta,
                                                         std::to_string(ctx.cells[i].seed), r));
                }
                if (!pooled.empty())
                    write_eval_row(out, make_eval_record(cfg.perturbations[j], a.sigma, a.beta, "pooled", pooled));
            }
        }
        close_out(out, p);
    }
    const auto p = ctx.out / "comparisons.json";
    auto out = open_out(p);
    out << comparisons_json(cfg.comparisons).dump(1) << '\n';
    close_out(out, p);
}

void run_agents(RunContext& ctx, bool training) {
    const auto& cfg = ctx.cfg;
    const std::size_t n_seeds = cfg.seeds.size();
    for (const auto& a : cfg.agents)
        for (std::size_t si = 0; si < n_seeds; ++si) {
            Cell cell{agent_cell_name(a, ctx.seed(si)), ctx.seed(si)};
            if (training) cell.streams = {"init", "train_env", "exploration", "buffer"};
            if (!cfg.perturbations.empty()) cell.streams.push_back("eval_episode_seed");
            ctx.cells.push_back(std::move(cell));
        }
    std::vector<std::vector<std::vector<double>>> returns(ctx.cells.size());
    std::mutex log_mu;
    for_each_cell(ctx.cells.size(), ctx.opt.jobs, [&](std::size_t i) {
        Cell& cell = ctx.cells[i];
        guarded(cell, [&] {
            const auto& entry = cfg.agents[i / n_seeds];
            const fs::path dir = ctx.out / cell_dir(cell.name);
            AgentNetworks nets;
            if (training) {
                AgentConfig ac = cfg.agent;
                ac.sigma = entry.sigma;
                ac.beta = entry.beta;
                ac.use_dual = entry.use_dual;
                ac.seed = cell.seed;
                auto result = train(ac, cfg.env.physics);
                {
                    const auto p = dir / "curve.csv";
                    auto out = open_out(p);
                    write_curve_csv(out, result.curve);
                    close_out(out, p);
                    cell.outputs.push_back(cell_dir(cell.name) + "/curve.csv");
                }
                const auto p = dir / "checkpoint.txt";
                auto out = open_out(p);
                save_networks(out, result.nets);
                close_out(out, p);
                cell.outputs.push_back(cell_dir(cell.name) + "/checkpoint.txt");
                nets = std::move(result.nets);
            } else {
                const fs::path p = fs::path(cfg.checkpoint_dir) / cell_dir(cell.name) / "checkpoint.txt";
                std::ifstream in(p);
                if (!in) throw std::runtime_error("missing checkpoint " + p.string());
                nets = load_networks(in);
            }
            for (const auto& pert : cfg.perturbations)
                returns[i].push_back(evaluate_returns(nets, pert, cfg.eval_episodes, cell.seed, cfg.env.physics));
        });
        std::lock_guard lock(log_mu);
        ctx.log << cell.name << ": " << cell.status << (cell.error.empty() ? "" : " (" + cell.error + ")") << '\n';
    });
    if (!cfg.perturbations.empty()) write_eval_outputs(ctx, returns, n_seeds);
}

void write_manifest(const RunContext& ctx, const json& raw, const std::string& command, const std::string& config_path,
                    const std::string& started) {
    json cells = json::array(), registry = json::object();
    for (const auto& c : ctx.cells) {
        json cj{{"name", c.name}, {"status", c.status}, {"outputs", c.outputs}};
        if (!c.error.empty()) cj["error"] = c.error;
        cells.push_back(std::move(cj));
        registry[c.name] = {{"seed", c.seed}, {"streams", c.streams}};
    }
    const json m{{"code_version", kCodeVersion},
                 {"command", command},
                 {"config_path", config_path},
                 {"config_hash", canonical_hash(raw)},
                 {"experiment", to_string(ctx.cfg.kind)},
                 {"seed_offset", ctx.opt.seed_offset},
                 {"jobs", ctx.opt.jobs},
                 {"started_at", started},
                 {"finished_at", utc_now()},
                 {"cells", std::move(cells)},
                 {"seed_registry", std::move(registry)}};
    const auto p = ctx.out / "manifest.json";
    auto out = open_out(p);
    out << m.dump(1) << '\n';
    close_out(out, p);
}

} // namespace

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& log) {
    const auto started = utc_now();
    json raw;
    ExperimentConfig cfg;
    fs::path out;
    try {
        require(opt.jobs >= 1, "--jobs must be at least 1");
        raw = load_json_file(config_path);
        cfg = parse_config(raw, fs::path(config_path).parent_path().string().empty()
                                    ? std::string(".")
                                    : fs::path(config_path).parent_path().string());
        if (command_for(cfg.kind) != command)
            throw ConfigError("config experiment '" + to_string(cfg.kind) + "' runs under '" + command_for(cfg.kind) +
                              "', not '" + command + "'");
        out = !opt.out_dir.empty() ? fs::path(opt.out_dir) : fs::path(cfg.output_dir);
        require(!out.empty(), "no output directory: pass --out or set output_dir");
        for (auto s : cfg.seeds)
            require(static_cast<std::int64_t>(s) + opt.seed_offset >= 0, "--seed-offset makes a seed negative");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    RunContext ctx{cfg, out, opt, log, {}};
    try {
        fs::create_directories(out);
        switch (cfg.kind) {
        case ExperimentKind::plan: run_plan(ctx); break;
        case ExperimentKind::coverability: run_coverability(ctx); break;
        case ExperimentKind::rfltv_exact: run_rfltv(ctx); break;
        case ExperimentKind::practical_train: run_agents(ctx, true); break;
        case ExperimentKind::practical_eval: run_agents(ctx, false); break;
        case ExperimentKind::dual_property_suite: run_dual_suite(ctx); break;
        }
        write_manifest(ctx, raw, command, config_path, started);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    int code = kExitOk;
    for (const auto& c : ctx.cells) {
        if (c.status == "ok") continue;
        log << "cell " << c.name << " failed: " << c.error << '\n';
        if (code == kExitOk) code = c.code;
    }
    if (code == kExitOk && cfg.kind == ExperimentKind::plan) {
        for (std::size_t i = 0; i < ctx.cells.size(); ++i)
            log << ctx.cells[i].name << ": wrote " << ctx.cells[i].outputs.size() << " files\n";
    }
    if ((cfg.kind == ExperimentKind::practical_train || cfg.kind == ExperimentKind::practical_eval) &&
        !cfg.perturbations.empty()) {
        const int rc = run_report(out.string(), out.string(), log);
        if (code == kExitOk) code = rc;
    }
    return code;
}

// --- report -----------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": bad number '" + s + "'");
    }
}

bool same_agent(const ReportRow& r, const AgentEntry& a, const PerturbationSpec& p) {
    return r.variant == a.variant() && r.sigma == a.sigma && r.beta == a.beta && r.perturbation.kind == p.kind &&
           r.perturbation.level == p.level;
}

} // namespace

Report build_report(const std::string& run_dir) {
    const fs::path path = fs::path(run_dir) / "eval_returns.csv";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: missing " + path.string());
    std::string line;
    const std::string header = "variant,kind,level,sigma,beta,seed,episode,return";
    if (!std::getline(in, line) || line != header)
        throw std::runtime_error("report: " + path.string() + " has an unexpected header");

    struct Group {
        ReportRow row;
        std::vector<double> returns;
        std::set<std::string> seeds;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> index;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (f.size() != 8) throw std::runtime_error("report: " + where + ": expected 8 fields");
        const std::string key = f[0] + ',' + f[1] + ',' + f[2] + ',' + f[3] + ',' + f[4];
        auto it = index.find(key);
        if (it == index.end()) {
            Group g;
            g.row.variant = f[0];
            try {
                g.row.perturbation.kind = perturbation_kind_from_string(f[1]);
            } catch (const std::exception&) {
                throw std::runtime_error("report: " + where + ": unknown kind '" + f[1] + "'");
            }
            g.row.perturbation.level = parse_double(f[2], where);
            g.row.sigma = parse_double(f[3], where);
            g.row.beta = parse_double(f[4], where);
            it = index.emplace(key, groups.size()).first;
            groups.push_back(std::move(g));
        }
        auto& g = groups[it->second];
        g.returns.push_back(parse_double(f[7], where));
        g.seeds.insert(f[5]);
    }

    Report rep;
    for (auto& g : groups) {
        const auto s = summarize(g.returns);
        g.row.n_seeds = static_cast<int>(g.seeds.size());
        g.row.n_episodes = s.n;
        g.row.mean = s.mean;
        g.row.ci_low = s.ci_low;
        g.row.ci_high = s.ci_high;
        rep.rows.push_back(g.row);
    }

    const fs::path cpath = fs::path(run_dir) / "comparisons.json";
    if (fs::exists(cpath)) {
        const auto specs = parse_comparisons(load_json_file(cpath.string()));
        for (const auto& spec : specs) {
            ComparisonRow c;
            c.spec = spec;
            bool have_r = false, have_b = false;
            for (const auto& r : rep.rows) {
                if (same_agent(r, spec.robust, spec.perturbation)) {
                    c.robust = r;
                    have_r = true;
                }
                if (same_agent(r, spec.baseline, spec.perturbation)) {
                    c.baseline = r;
                    have_b = true;
                }
            }
            c.found = have_r && have_b;
            if (c.found) {
                c.robust_ge_baseline = c.robust.mean >= c.baseline.mean;
                c.cis_separated = c.robust.ci_low > c.baseline.ci_high;
            }
            rep.comparisons.push_back(c);
        }
    }
    return rep;
}

int run_report(const std::string& run_dir, const std::string& out_dir, std::ostream& log) {
    Report rep;
    try {
        rep = build_report(run_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    try {
        const fs::path out = out_dir.empty() ? fs::path(run_dir) : fs::path(out_dir);
        {
            const auto p = out / "summary.csv";
            auto o = open_out(p);
            o << "variant,kind,level,sigma,beta,n_seeds,n_episodes,mean_return,ci_low,ci_high\n";
            for (const auto& r : rep.rows)
                o << r.variant << ',' << to_string(r.perturbation.kind) << ',' << fmt17(r.perturbation.level) << ','
                  << fmt17(r.sigma) << ',' << fmt17(r.beta) << ',' << r.n_seeds << ',' << r.n_episodes << ','
                  << fmt17(r.mean) << ',' << fmt17(r.ci_low) << ',' << fmt17(r.ci_high) << '\n';
            close_out(o, p);
        }
        const auto p = out / "comparison.csv";
        auto o = open_out(p);
        o << "kind,level,robust_variant,robust_sigma,robust_beta,robust_mean,robust_ci_low,robust_ci_high,"
             "baseline_variant,baseline_sigma,baseline_beta,baseline_mean,baseline_ci_low,baseline_ci_high,"
             "robust_ge_baseline,cis_separated,status\n";
        for (const auto& c : rep.comparisons) {
            const std::string status = !c.found                                       ? "missing"
                                       : c.robust_ge_baseline && c.cis_separated ? "pass"
                                                                                 : "flagged";
            o << to_string(c.spec.perturbation.kind) << ',' << fmt17(c.spec.perturbation.level) << ','
              << c.spec.robust.variant() << ',' << fmt17(c.spec.robust.sigma) << ',' << fmt17(c.spec.robust.beta)
              << ',' << fmt17(c.robust.mean) << ',' << fmt17(c.robust.ci_low) << ',' << fmt17(c.robust.ci_high) << ','
              << c.spec.baseline.variant() << ',' << fmt17(c.spec.baseline.sigma) << ','
              << fmt17(c.spec.baseline.beta) << ',' << fmt17(c.baseline.mean) << ',' << fmt17(c.baseline.ci_low)
              << ',' << fmt17(c.baseline.ci_high) << ',' << (c.robust_ge_baseline ? 1 : 0) << ','
              << (c.cis_separated ? 1 : 0) << ',' << status << '\n';
        }
        close_out(o, p);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    log << std::left << std::setw(8) << "variant" << std::setw(19) << "kind" << std::setw(7) << "level"
        << std::setw(7) << "sigma" << std::setw(6) << "beta" << std::setw(5) << "n" << "mean [95% CI]\n";
    for (const auto& r : rep.rows) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.1f [%.1f, %.1f]", r.mean, r.ci_low, r.ci_high);
        log << std::setw(8) << r.variant << std::setw(19) << to_string(r.perturbation.kind) << std::setw(7)
            << fmtg(r.perturbation.level) << std::setw(7) << fmtg(r.sigma) << std::setw(6) << fmtg(r.beta)
            << std::setw(5) << r.n_episodes << buf << '\n';
    }
    for (const auto& c : rep.comparisons) {
        log << "compare " << to_string(c.spec.perturbation.kind) << ' ' << fmtg(c.spec.perturbation.level)
            << ": sigma " << fmtg(c.spec.robust.sigma) << "/beta " << fmtg(c.spec.robust.beta) << " vs sigma "
            << fmtg(c.spec.baseline.sigma) << "/beta " << fmtg(c.spec.baseline.beta) << ": ";
        if (!c.found) log << "missing cells\n";
        else
            log << fmtg(c.robust.mean) << " vs " << fmtg(c.baseline.mean)
                << (c.robust_ge_baseline ? (c.cis_separated ? " (robust ahead, CIs separated)\n"
                                                            : " (FLAGGED: robust ahead, CIs overlap)\n")
                                         : " (FLAGGED: robust below baseline)\n");
    }
    return kExitOk;
}

} // namespace drrl::harness
