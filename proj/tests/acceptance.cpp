// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "kinetic/experiments.hpp"

using namespace kinetic;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string failed_checks(const ExperimentReport& r) {
    std::string s;
    for (const auto& c : r.checks)
        if (!c.passed) s += (s.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
    return s;
}

Outcome run(const std::string& id, const json& params, double budget_s, std::uint64_t seed = 7) {
    RunConfig c = RunConfig::from_json({{"experiment", id}, {"seed", seed}, {"params", params}});
    const auto r = run_experiment(c);
    std::ostringstream os;
    os << r.seconds << " s";
    const bool fast = r.seconds < budget_s;
    if (!fast) os << " over the " << budget_s << " s budget";
    if (!r.passed()) os << "; failed: " << failed_checks(r);
    return {r.passed() && fast, os.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "kinetic_acceptance_determinism";
    std::filesystem::remove_all(root);
    const std::vector<std::pair<std::string, json>> cases{
        {"verify-stretching", {{"lemma", "cap"}, {"samples", 100000}, {"extra_eps", {1.5}}}},
        {"maxwell-flux", json::object()},
        {"decay-nonlinear", {{"horizon", 6.0}, {"c0_trials", 2}, {"pairs", 2}}}};
    std::string bad;
    for (const auto& [id, p] : cases) {
        for (const char* run : {"a", "b"}) {
            RunConfig c = RunConfig::from_json({{"experiment", id}, {"seed", 11}, {"params", p}});
            write_artifacts(run_experiment(c), (root / run).string());
        }
        const std::string a = slurp(root / "a" / (id + ".csv")), b = slurp(root / "b" / (id + ".csv"));
        if (a.empty() || a != b) bad += id + " ";
    }
    std::filesystem::remove_all(root);
    return {bad.empty(), bad.empty() ? "3 experiments, byte-identical CSV" : "differs: " + bad};
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"stretching, caps",
         [] { return run("verify-stretching", {{"lemma", "cap"}, {"eps", 0.5}, {"L", 1}, {"M", 2}, {"T", 1},
                                               {"samples", 100000}, {"extra_eps", {1.5}}}, 30); }},
        {"stretching, lateral",
         [] { return run("verify-stretching", {{"lemma", "lateral"}, {"eps", 0.2}, {"r", 1}, {"eta", 0.5}, {"M", 2},
                                               {"T", 1}, {"samples", 100000}, {"extra_eps", {0.5, 1, 2}}}, 30); }},
        {"circle billiard invariants",
         [] { return run("verify-stretching", {{"lemma", "chain"}, {"chain_len", 50}, {"chains", 100}}, 1); }},
        {"collision-frequency bounds", [] { return run("kernel-bounds", {{"check", "nu-bounds"}}, 10); }},
        {"conservation laws", [] { return run("kernel-bounds", {{"check", "conservation"}}, 300); }},
        {"kernel decomposition (K1)", [] { return run("kernel-bounds", {{"check", "k1"}}, 60); }},
        {"jacobian lemmas", [] { return run("jacobian", json::object(), 10); }},
        {"Maxwell operator flux", [] { return run("maxwell-flux", json::object(), 5); }},
        {"linear decay and eps-scaling", [] { return run("decay-linear", json::object(), 1800); }},
        {"nonlinear contraction", [] { return run("decay-nonlinear", json::object(), 1800); }},
        {"Poisson eps^-2 scaling", [] { return run("poisson-scaling", json::object(), 300); }},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int n = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(n)) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << "CRITERION " << n << " [" << criteria[k].first << "]: " << (o.pass ? "PASS" : "FAIL") << "  ("
                  << o.detail << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
