// kinetic: command-line front end for the verification experiments.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kinetic/experiments.hpp"

using nlohmann::json;

namespace {

json parse_value(const std::string& s) {
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return s;
    }
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kinetic::ConfigError("cannot open " + path);
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw kinetic::ConfigError(path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic boundary-layer verification harness"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        std::string config;
        std::string out;
        std::uint64_t seed = 0;
        bool quiet = false;
        std::map<std::string, std::string> flags;
        std::vector<std::string> sets;
    };
    std::map<std::string, Sub> subs;
    for (const auto& id : kinetic::experiment_ids()) {
        Sub& s = subs[id];
        s.app = app.add_subcommand(id, "run the " + id + " experiment");
        s.app->add_option("--config,-c", s.config, "JSON run configuration");
        s.app->add_option("--out,-o", s.out, "output directory (default $KINETIC_OUTPUT_DIR or .)");
        s.app->add_option("--seed", s.seed, "64-bit seed");
        s.app->add_option("--set", s.sets, "key=value parameter override (value parsed as JSON)");
        s.app->add_flag("--quiet,-q", s.quiet, "print only the verdict");
        const json defaults = kinetic::default_params(id);
        for (const auto& [key, value] : defaults.items())
            s.app->add_option("--" + key, s.flags[key], "default " + value.dump());
    }
    std::vector<std::string> report_files;
    auto* rep = app.add_subcommand("report", "render stored JSON reports as tables");
    rep->add_option("files", report_files, "report JSON files")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) {
            bool ok = true;
            for (const auto& f : report_files) {
                const auto r = kinetic::ExperimentReport::from_json(load_file(f));
                std::cout << kinetic::render_table(r) << '\n';
                ok = ok && r.passed();
            }
            return ok ? 0 : 1;
        }
        for (auto& [id, s] : subs) {
            if (!s.app->parsed()) continue;
            json doc = {{"experiment", id}};
            if (!s.config.empty()) {
                doc = load_file(s.config);
                if (doc.value("experiment", id) != id)
                    throw kinetic::ConfigError("config is for '" + doc.value("experiment", std::string()) + "'");
                doc["experiment"] = id;
            }
            if (!doc.contains("params")) doc["params"] = json::object();
            for (const auto& [key, text] : s.flags)
                if (s.app->count("--" + key) > 0) doc["params"][key] = parse_value(text);
            for (const auto& kv : s.sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw kinetic::ConfigError("--set expects key=value: " + kv);
                doc["params"][kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
            }
            if (s.app->count("--seed") > 0) doc["seed"] = s.seed;
            if (!s.out.empty()) doc["output_dir"] = s.out;
            else if (!doc.contains("output_dir"))
                if (const char* env = std::getenv("KINETIC_OUTPUT_DIR")) doc["output_dir"] = env;
            const auto cfg = kinetic::RunConfig::from_json(doc);
            const auto r = kinetic::run_experiment(cfg);
            kinetic::write_artifacts(r, cfg.output_dir);
            if (s.quiet) std::cout << id << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
            else std::cout << kinetic::render_table(r) << '\n';
            return r.passed() ? 0 : 1;
        }
    } catch (const kinetic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
