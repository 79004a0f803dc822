#include "kinetic/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kinetic {

const char* code_version() { return "0.1.0"; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string Table::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
    return os.str();
}

void ExperimentReport::check(const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({name, ok, detail});
}

void ExperimentReport::measure(const std::string& name, double value, double uncertainty, const std::string& note) {
    constants[name] = {value, uncertainty, note};
}

bool ExperimentReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double denum(const json& j) {
    if (j.is_number()) return j.get<double>();
    auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
}

} // namespace

json ExperimentReport::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["params"] = params;
    j["counts"] = counts;
    json c = json::object();
    for (const auto& [k, m] : constants)
        c[k] = {{"value", num(m.value)}, {"uncertainty", num(m.uncertainty)}, {"note", m.note}};
    j["constants"] = c;
    json ch = json::array();
    for (const auto& x : checks) ch.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
    j["checks"] = ch;
    j["passed"] = passed();
    j["seconds"] = seconds;
    j["provenance"] = {{"code_version", code_version()}, {"seed", seed}};
    json rows = json::array();
    for (const auto& r : table.rows) {
        json row = json::array();
        for (double x : r) row.push_back(num(x));
        rows.push_back(row);
    }
    j["table"] = {{"columns", table.columns}, {"rows", rows}};
    return j;
}

ExperimentReport ExperimentReport::from_json(const json& j) {
    ExperimentReport r;
    r.experiment = j.value("experiment", "");
    r.params = j.value("params", json::object());
    if (j.contains("counts")) r.counts = j["counts"].get<std::map<std::string, std::int64_t>>();
    if (j.contains("constants"))
        for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
            r.constants[it.key()] = {denum(it.value()["value"]), denum(it.value()["uncertainty"]),
                                     it.value().value("note", "")};
    if (j.contains("checks"))
        for (const auto& x : j["checks"]) r.checks.push_back({x["name"], x["passed"], x.value("detail", "")});
    r.seconds = j.value("seconds", 0.0);
    if (j.contains("provenance")) r.seed = j["provenance"].value("seed", std::uint64_t(0));
    if (j.contains("table")) {
        r.table.columns = j["table"].value("columns", std::vector<std::string>{});
        for (const auto& row : j["table"]["rows"]) {
            std::vector<double> v;
            for (const auto& x : row) v.push_back(denum(x));
            r.table.add(std::move(v));
        }
    }
    return r;
}

std::string render_table(const ExperimentReport& r) {
    std::ostringstream os;
    os << "== " << r.experiment << "  (" << (r.passed() ? "PASS" : "FAIL") << ", "
       << format_short(r.seconds) << " s, seed " << r.seed << ")\n";
    for (const auto& [k, v] : r.counts) os << "  count    " << k << " = " << v << '\n';
    for (const auto& [k, m] : r.constants) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  measure  %s = %.6g +- %.2g", k.c_str(), m.value, m.uncertainty);
        os << buf;
        if (!m.note.empty()) os << "  [" << m.note << "]";
        os << '\n';
    }
    for (const auto& c : r.checks) {
        os << "  " << (c.passed ? "PASS " : "FAIL ") << "   " << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << '\n';
    }
    return os.str();
}

} // namespace kinetic
