#include "drrl/errors.hpp"
#include "drrl/harness.hpp"
#include "drrl/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace drrl;
using namespace drrl::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("drrl_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("experiment kinds") {
    for (auto k : {ExperimentKind::plan, ExperimentKind::coverability, ExperimentKind::rfltv_exact,
                   ExperimentKind::practical_train, ExperimentKind::practical_eval,
                   ExperimentKind::dual_property_suite})
        CHECK(experiment_kind_from_string(to_string(k)) == k);
    CHECK(command_for(ExperimentKind::practical_train) == "train");
    CHECK(command_for(ExperimentKind::rfltv_exact) == "rfltv-exact");
    CHECK_THROWS_AS(experiment_kind_from_string("nope"), ConfigError);
}

TEST_CASE("config parsing") {
    const json ok = json::parse(R"({"experiment": "plan", "environment": {"type": "fail_chain", "horizon": 3},
                                    "algorithm": {"sigmas": [0.0, 0.3]}, "seeds": [0]})");
    const auto cfg = parse_config(ok);
    CHECK(cfg.kind == ExperimentKind::plan);
    CHECK(cfg.env.horizon == 3);
    CHECK(cfg.sigmas == std::vector<double>{0.0, 0.3});

    json bad = ok;
    bad["algorithm"]["sigmass"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = ok;
    bad["seeds"] = json::array();
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = ok;
    bad["algorithm"]["sigmas"] = {-0.1};
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    bad = ok;
    bad["environment"]["type"] = "maze";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("canonical hash ignores key order") {
    const auto a = json::parse(R"({"b": 1, "a": {"y": [1, 2], "x": "s"}})");
    const auto b = json::parse(R"({"a": {"x": "s", "y": [1, 2]}, "b": 1})");
    CHECK(canonical_hash(a) == canonical_hash(b));
    CHECK(canonical_hash(a).size() == 16);
    CHECK(canonical_hash(a) != canonical_hash(json::parse(R"({"b": 2, "a": {"y": [1, 2], "x": "s"}})")));
}

TEST_CASE("report arithmetic on a two-cell fixture") {
    const auto dir = scratch("report");
    std::string csv = "variant,kind,level,sigma,beta,seed,episode,return\n";
    const double robust[4] = {10, 20, 30, 40};
    for (int i = 0; i < 4; ++i) {
        csv += "rfltv,force_scale,0.5,0.5,0.5," + std::to_string(i / 2) + "," + std::to_string(i % 2) + "," +
               std::to_string(robust[i]) + "\n";
        csv += "rfltv,force_scale,0.5,0,0," + std::to_string(i / 2) + "," + std::to_string(i % 2) + ",15\n";
    }
    write_file(dir / "eval_returns.csv", csv);
    write_file(dir / "comparisons.json",
               R"([{"kind": "force_scale", "level": 0.5, "robust": {"sigma": 0.5, "beta": 0.5},
                    "baseline": {"sigma": 0, "beta": 0}},
                   {"kind": "action_noise", "level": 0.3, "robust": {"sigma": 0.5, "beta": 0.5},
                    "baseline": {"sigma": 0, "beta": 0}}])");

    const auto rep = build_report(dir.string());
    REQUIRE(rep.rows.size() == 2);
    const auto& r = rep.rows[0];
    CHECK(r.n_seeds == 2);
    CHECK(r.n_episodes == 4);
    CHECK(r.mean == 25.0);
    // sample sd = sqrt(500 / 3), half-width 1.96 sd / 2
    const double half = 1.96 * std::sqrt(500.0 / 3.0) / 2.0;
    CHECK(r.ci_low == doctest::Approx(25.0 - half).epsilon(1e-12));
    CHECK(r.ci_high == doctest::Approx(25.0 + half).epsilon(1e-12));
    const auto& b = rep.rows[1];
    CHECK(b.mean == 15.0);
    CHECK(b.ci_low == 15.0);
    CHECK(b.ci_high == 15.0);

    REQUIRE(rep.comparisons.size() == 2);
    CHECK(rep.comparisons[0].found);
    CHECK(rep.comparisons[0].robust_ge_baseline);
    CHECK_FALSE(rep.comparisons[0].cis_separated);
    CHECK_FALSE(rep.comparisons[1].found);

    std::ostringstream log;
    CHECK(run_report(dir.string(), dir.string(), log) == kExitOk);
    const auto summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("variant,kind,level,sigma,beta,n_seeds,n_episodes,mean_return,ci_low,ci_high\n", 0) == 0);
    const auto comparison = slurp(dir / "comparison.csv");
    CHECK(comparison.find("missing") != std::string::npos);
    CHECK(comparison.find("flagged") != std::string::npos);

    const auto empty = scratch("report_missing");
    CHECK(run_report(empty.string(), empty.string(), log) != kExitOk);
}

TEST_CASE("summary statistics") {
    const std::vector<double> c{7.0, 7.0, 7.0};
    const auto s = summarize(c);
    CHECK(s.mean == 7.0);
    CHECK(s.ci_low == 7.0);
    CHECK(s.ci_high == 7.0);
    const std::vector<double> one{3.0};
    CHECK(summarize(one).ci_low == 3.0);
}

TEST_CASE("run_command exit codes and reruns") {
    const auto dir = scratch("cli");
    write_file(dir / "plan.json", R"({"experiment": "plan", "environment": {"type": "fail_chain", "horizon": 2},
                                       "algorithm": {"sigmas": [0.0, 0.3]}, "seeds": [0], "output_dir": "out"})");
    std::ostringstream log;
    RunOptions a;
    a.out_dir = (dir / "a").string();
    RunOptions b = a;
    b.out_dir = (dir / "b").string();
    b.jobs = 2;
    REQUIRE(run_command("plan", (dir / "plan.json").string(), a, log) == kExitOk);
    REQUIRE(run_command("plan", (dir / "plan.json").string(), b, log) == kExitOk);
    for (const char* f : {"values.csv", "q.csv", "policy.csv", "worst_kernel.csv"}) {
        const auto pa = dir / "a" / "cells" / "sigma_0.3" / f;
        REQUIRE(fs::exists(pa));
        CHECK(slurp(pa) == slurp(dir / "b" / "cells" / "sigma_0.3" / f));
    }
    CHECK(slurp(dir / "a" / "cells" / "sigma_0.3" / "values.csv").find("0,0,1.7") != std::string::npos);
    const auto manifest = load_json_file((dir / "a" / "manifest.json").string());
    CHECK(manifest["code_version"] == kCodeVersion);
    CHECK(manifest["cells"].size() == 2);

    // wrong subcommand for the experiment
    CHECK(run_command("coverability", (dir / "plan.json").string(), a, log) == kExitConfig);

    write_file(dir / "typo.json", R"({"experiment": "plan", "environment": {"type": "fail_chain"},
                                       "algorithm": {"sigma": 0.3, "colour": 1}, "seeds": [0]})");
    CHECK(run_command("plan", (dir / "typo.json").string(), a, log) == kExitConfig);
    CHECK(run_command("plan", (dir / "absent.json").string(), a, log) == kExitConfig);

    write_file(dir / "big.json", R"({"experiment": "coverability",
                                      "environment": {"type": "random", "states": 4, "actions": 3, "horizon": 3},
                                      "algorithm": {"sigma": 0.2, "policy_budget": 1000}, "seeds": [0]})");
    RunOptions c;
    c.out_dir = (dir / "c").string();
    CHECK(run_command("coverability", (dir / "big.json").string(), c, log) == kExitBudget);
    const auto m = load_json_file((dir / "c" / "manifest.json").string());
    CHECK(m["cells"][0]["status"] == "failed");

    CHECK(exit_code_for(NumericFault("x")) == kExitNumeric);
    CHECK(exit_code_for(BudgetExceeded("x", 2, 1)) == kExitBudget);
    CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitFailure);
}
