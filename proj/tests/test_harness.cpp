#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinetic/experiments.hpp"

using namespace kinetic;
using nlohmann::json;

TEST_CASE("config validation") {
    CHECK_THROWS_AS(RunConfig::from_json({{"experiment", "nope"}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"experiment", "jacobian"}, {"colour", 1}}), ConfigError);
    auto c = RunConfig::from_json({{"experiment", "jacobian"}, {"params", {{"wobble", 1}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::from_json({{"experiment", "decay-linear"}, {"params", {{"eps", {0.4, -1.0}}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::from_json({{"experiment", "decay-nonlinear"}, {"params", {{"weight", {{"class", "x"}}}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::from_json({{"experiment", "decay-nonlinear"}, {"params", {{"dt", -1}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    // One eps value cannot fix an exponent.
    c = RunConfig::from_json({{"experiment", "decay-linear"}, {"params", {{"eps", {0.4}}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::from_json({{"experiment", "kernel-bounds"}, {"params", {{"check", "nu_bounds"}}}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    for (const auto& id : experiment_ids()) CHECK_NOTHROW(RunConfig::from_json({{"experiment", id}}).validate());
}

TEST_CASE("reports round trip and carry provenance") {
    RunConfig c = RunConfig::from_json({{"experiment", "jacobian"}, {"seed", 99}});
    const ExperimentReport r = run_experiment(c);
    CHECK(r.seed == 99);
    CHECK(r.passed());
    const json j = r.to_json();
    CHECK(j.at("provenance").at("code_version") == code_version());
    CHECK(j.at("provenance").at("seed") == 99);
    const ExperimentReport back = ExperimentReport::from_json(j);
    CHECK(render_table(back) == render_table(r));
    CHECK(back.table.to_csv() == r.table.to_csv());
}

TEST_CASE("same seed, same CSV bytes") {
    RunConfig c = RunConfig::from_json(
        {{"experiment", "verify-stretching"}, {"seed", 3}, {"params", {{"lemma", "cap"}, {"samples", 2000}}}});
    const auto a = run_experiment(c), b = run_experiment(c);
    CHECK(a.table.to_csv() == b.table.to_csv());
    c.seed = 4;
    c.params["lemma"] = "angle";
    const auto d = run_experiment(c);
    c.seed = 5;
    CHECK(run_experiment(c).table.to_csv() != d.table.to_csv());
}

TEST_CASE("artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "kinetic_artifacts_test";
    RunConfig c = RunConfig::from_json({{"experiment", "jacobian"}});
    write_artifacts(run_experiment(c), dir.string());
    CHECK(std::filesystem::exists(dir / "jacobian.csv"));
    std::ifstream in(dir / "jacobian.json");
    const json j = json::parse(in);
    CHECK(j.at("experiment") == "jacobian");
    std::filesystem::remove_all(dir);
}
