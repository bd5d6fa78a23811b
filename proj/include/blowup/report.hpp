#pragma once

#include "blowup/config.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

inline constexpr const char* kArtifactName = "blowup-lab";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class VerdictStatus { Pass, Fail, Warn };
std::string_view to_string(VerdictStatus s);

struct Verdict {
    std::string name;
    VerdictStatus status = VerdictStatus::Fail;
    std::optional<double> measured;
    std::optional<double> expected;
    std::optional<double> tolerance;
    std::string detail;
};

// Report assembly. report.json is a pure function of the input (no clock, no paths
// outside the config echo); wall-clock timing goes to the timing.json sidecar.
class Report {
public:
    using json = nlohmann::ordered_json;

    Report(std::string command, const Config& cfg, const std::string& extra_input = "");

    json& predictions() { return predictions_; }
    json& fits() { return fits_; }
    json& diagnostics() { return diagnostics_; }

    // Relative check |measured/expected - 1| <= tol.
    void check_rel(const std::string& name, double measured, double expected, double tol,
                   const std::string& detail = "");
    void check_abs(const std::string& name, double measured, double expected, double tol,
                   const std::string& detail = "");
    void check(const std::string& name, bool ok, const std::string& detail = "");
    void add(Verdict v);
    void error(const std::string& kind, const std::string& message);
    void time(const std::string& phase, double seconds);

    const std::vector<Verdict>& verdicts() const { return verdicts_; }
    bool has_errors() const { return !errors_.empty(); }
    // 0 all verdicts pass (warnings allowed), 2 some verdict failed, 1 execution error.
    int exit_code() const;

    json to_json() const;
    json timing_json() const;
    // Writes report.json and timing.json into dir (created if needed).
    void write(const std::string& dir) const;

    // Registers a data file written next to the report (relative name).
    void artifact(const std::string& name) { artifacts_.push_back(name); }

private:
    std::string command_;
    std::string input_hash_;
    json scenario_;
    json predictions_ = json::object();
    json fits_ = json::object();
    json diagnostics_ = json::object();
    std::vector<Verdict> verdicts_;
    json errors_ = json::array();
    std::vector<std::string> artifacts_;
    std::vector<std::pair<std::string, double>> timing_;
};

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

Report::json config_to_json(const Config& cfg);

}  // namespace blowup
