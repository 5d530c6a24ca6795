#include "kaclab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kaclab {

namespace {

std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

} // namespace

Record upper_record(double t, double measured, double bound, double tol, double stderr, std::string label)
{
    Record r{t, measured, bound, bound - measured, stderr, std::move(label), true};
    r.pass = r.margin >= -(tol + stderr);
    return r;
}

Record lower_record(double t, double measured, double bound, double tol, double stderr, std::string label)
{
    Record r{t, measured, bound, measured - bound, stderr, std::move(label), true};
    r.pass = r.margin >= -(tol + stderr);
    return r;
}

bool ExperimentReport::pass() const
{
    for (const auto& r : records)
        if (!r.pass) return false;
    return true;
}

nlohmann::ordered_json to_json(const ExperimentReport& r)
{
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["experiment"] = r.experiment;
    j["config_hash"] = hex64(r.config_hash);
    j["seed"] = r.seed;
    j["status"] = r.pass() ? "pass" : "violation";
    std::size_t failed = 0;
    for (const auto& x : r.records) failed += x.pass ? 0 : 1;
    j["records_total"] = r.records.size();
    j["records_failed"] = failed;
    j["meta"] = r.meta;
    j["notes"] = r.notes;
    auto& files = j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& a : r.artifacts) files.push_back(a.first);
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    for (const auto& x : r.records) {
        nlohmann::ordered_json e;
        e["t"] = x.t;
        e["measured"] = x.measured;
        e["bound"] = x.bound;
        e["margin"] = x.margin;
        e["stderr"] = x.stderr;
        e["label"] = x.label;
        e["pass"] = x.pass;
        recs.push_back(std::move(e));
    }
    return j;
}

std::string to_csv(const ExperimentReport& r)
{
    std::string s = "t,measured,bound,margin,stderr\n";
    for (const auto& x : r.records) {
        s += num(x.t) + "," + num(x.measured) + "," + num(x.bound) + "," + num(x.margin) + "," + num(x.stderr) + "\n";
    }
    return s;
}

void write_report(const ExperimentReport& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_file(dir / "table.csv", to_csv(r));
    for (const auto& [name, bytes] : r.artifacts) write_file(dir / name, bytes);
}

void write_error_report(const std::string& experiment, const std::string& message, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["experiment"] = experiment;
    j["status"] = "error";
    j["error"] = message;
    write_file(dir / "report.json", j.dump(2) + "\n");
}

} // namespace kaclab
