#pragma once

#include "drrl/cartpole.hpp"
#include "drrl/occupancy.hpp"
#include "drrl/practical_agent.hpp"
#include "drrl/tabular_envs.hpp"
#include "drrl/version_space.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace drrl::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitNumeric = 4;

inline constexpr const char* kCodeVersion = "drrl 1.0.0";

enum class ExperimentKind { plan, coverability, rfltv_exact, practical_train, practical_eval, dual_property_suite };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// CLI subcommand that runs a given experiment kind.
std::string command_for(ExperimentKind kind);

struct EnvironmentConfig {
    std::string type = "fail_chain"; ///< fail_chain, risky_chain, gridworld, random, linear, file, cartpole
    int horizon = 2;
    double safe_reward = 0.5;
    double risky_reward = 1.0;
    double hazard = 0.2;
    GridworldSpec grid;
    int states = 3;
    int actions = 2;
    int num_fail = 1;
    int dim = 2;
    std::uint64_t seed = 0;
    std::string path; ///< resolved against the config file directory
    CartPolePhysics physics;

    bool is_tabular() const { return type != "cartpole"; }
};

/// Builds the tabular model (throws ConfigError for cartpole).
TabularRMDP make_tabular(const EnvironmentConfig& env);

struct AgentEntry {
    double sigma = 0.0;
    double beta = 0.0;
    bool use_dual = true;

    std::string variant() const { return use_dual ? "rfltv" : "dqn"; }
};

struct ComparisonSpec {
    PerturbationSpec perturbation;
    AgentEntry robust;
    AgentEntry baseline;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::plan;
    EnvironmentConfig env;
    std::vector<double> sigmas{0.3};                ///< plan, coverability
    double policy_budget = kDefaultPolicyBudget;    ///< coverability
    RfltvConfig rfltv;                              ///< rfltv_exact; seed taken per cell
    AgentConfig agent;                              ///< template; sigma, beta, use_dual, seed set per cell
    std::vector<AgentEntry> agents;                 ///< practical_train, practical_eval
    int eval_episodes = 20;
    std::vector<PerturbationSpec> perturbations;    ///< empty: no evaluation after training
    std::string checkpoint_dir;                     ///< practical_eval
    std::vector<ComparisonSpec> comparisons;
    int instances = 10000;                          ///< dual_property_suite
    int max_states = 20;
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir;
};

/// Strict schema check; unknown keys and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");

nlohmann::json load_json_file(const std::string& path);

/// FNV-1a over the sorted-key compact serialization, as 16 hex digits.
std::string canonical_hash(const nlohmann::json& doc);

struct RunOptions {
    std::string out_dir;          ///< overrides the config's output_dir
    int jobs = 1;
    std::int64_t seed_offset = 0;
};

/// Runs one subcommand against a config file and returns the process exit code.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& options,
                std::ostream& log);

/// Maps an exception to the CLI exit code.
int exit_code_for(const std::exception& e);

struct ReportRow {
    std::string variant;
    PerturbationSpec perturbation;
    double sigma = 0.0;
    double beta = 0.0;
    int n_seeds = 0;
    int n_episodes = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct ComparisonRow {
    ComparisonSpec spec;
    ReportRow robust;
    ReportRow baseline;
    bool found = false;
    bool robust_ge_baseline = false;
    bool cis_separated = false;
};

struct Report {
    std::vector<ReportRow> rows;
    std::vector<ComparisonRow> comparisons;
};

/// Aggregates eval_returns.csv (and comparisons.json when present) of a run directory.
Report build_report(const std::string& run_dir);

/// Writes summary.csv and comparison.csv into out_dir and prints a table.
int run_report(const std::string& run_dir, const std::string& out_dir, std::ostream& log);

} // namespace drrl::harness
