#ifndef KACLAB_REPORT_HPP
#define KACLAB_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace kaclab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

/// One checked point. margin is the signed slack (positive is good): bound -
/// measured for upper bounds, measured - bound for lower bounds.
struct Record {
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double stderr = 0.0;
    std::string label;
    bool pass = true;
};

Record upper_record(double t, double measured, double bound, double tol = 0.0, double stderr = 0.0,
                    std::string label = {});
Record lower_record(double t, double measured, double bound, double tol = 0.0, double stderr = 0.0,
                    std::string label = {});

struct ExperimentReport {
    std::string experiment;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<Record> records;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    std::vector<std::string> notes;
    /// Extra files (name, bytes) written next to the report.
    std::vector<std::pair<std::string, std::string>> artifacts;

    bool pass() const;
    /// 0 when every record passes, 1 otherwise.
    int exit_code() const { return pass() ? 0 : 1; }
};

nlohmann::ordered_json to_json(const ExperimentReport& r);
/// Columns t,measured,bound,margin,stderr.
std::string to_csv(const ExperimentReport& r);
/// Writes report.json and table.csv into dir (created if needed).
void write_report(const ExperimentReport& r, const std::filesystem::path& dir);
/// report.json for a run that stopped with a configuration or certification error.
void write_error_report(const std::string& experiment, const std::string& message, const std::filesystem::path& dir);

} // namespace kaclab

#endif
