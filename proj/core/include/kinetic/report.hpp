#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace kinetic {

using json = nlohmann::json;

struct Measured {
    double value = 0.0;
    double uncertainty = 0.0;
    std::string note;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Plot-ready table. Numbers are printed with 17 significant digits so a
// rerun with the same seed gives the same bytes.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) { rows.push_back(std::move(row)); }
    std::string to_csv() const;
};

struct ExperimentReport {
    std::string experiment;
    json params = json::object();
    std::map<std::string, std::int64_t> counts;
    std::map<std::string, Measured> constants;
    std::vector<Check> checks;
    Table table;
    double seconds = 0.0;
    std::uint64_t seed = 0;

    void check(const std::string& name, bool ok, const std::string& detail = {});
    void measure(const std::string& name, double value, double uncertainty = 0.0, const std::string& note = {});
    bool passed() const;

    json to_json() const;
    static ExperimentReport from_json(const json& j);
};

const char* code_version();

std::string format_double(double x);  // round-trip, for CSV
std::string format_short(double x);   // six significant digits, for labels

// Human-readable summary of one report.
std::string render_table(const ExperimentReport& r);

} // namespace kinetic
