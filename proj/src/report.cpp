#include "blowup/report.hpp"

#include "blowup/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace blowup {

std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "pass";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Warn: return "warn";
    }
    return "fail";
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Report::json config_to_json(const Config& cfg) {
    Report::json out = Report::json::object();
    for (const auto& [section, entries] : cfg.sections()) {
        Report::json sec = Report::json::object();
        for (const auto& [key, e] : entries)
            std::visit([&](const auto& v) { sec[key] = v; }, e.value);
        if (section.empty())
            for (auto& [k, v] : sec.items()) out[k] = v;
        else
            out[section] = sec;
    }
    return out;
}

namespace {

// JSON has no infinities or NaN; they are written as strings.
Report::json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

Report::Report(std::string command, const Config& cfg, const std::string& extra_input)
    : command_(std::move(command)) {
    input_hash_ = fnv1a_hex(command_ + '\n' + cfg.text() + '\n' + extra_input);
    scenario_ = config_to_json(cfg);
}

void Report::add(Verdict v) { verdicts_.push_back(std::move(v)); }

void Report::check_rel(const std::string& name, double measured, double expected, double tol,
                       const std::string& detail) {
    const double dev = std::abs(measured / expected - 1.0);
    add({name, dev <= tol ? VerdictStatus::Pass : VerdictStatus::Fail, measured, expected, tol,
         detail});
}

void Report::check_abs(const std::string& name, double measured, double expected, double tol,
                       const std::string& detail) {
    const double dev = std::abs(measured - expected);
    add({name, dev <= tol ? VerdictStatus::Pass : VerdictStatus::Fail, measured, expected, tol,
         detail});
}

void Report::check(const std::string& name, bool ok, const std::string& detail) {
    add({name, ok ? VerdictStatus::Pass : VerdictStatus::Fail, std::nullopt, std::nullopt,
         std::nullopt, detail});
}

void Report::error(const std::string& kind, const std::string& message) {
    errors_.push_back({{"kind", kind}, {"message", message}});
}

void Report::time(const std::string& phase, double seconds) { timing_.emplace_back(phase, seconds); }

int Report::exit_code() const {
    if (!errors_.empty()) return 1;
    for (const auto& v : verdicts_)
        if (v.status == VerdictStatus::Fail) return 2;
    return 0;
}

Report::json Report::to_json() const {
    json out;
    out["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    out["command"] = command_;
    out["input_hash"] = "fnv1a64:" + input_hash_;
    out["scenario"] = scenario_;
    out["predictions"] = predictions_;
    out["fits"] = fits_;
    json vs = json::array();
    for (const auto& v : verdicts_) {
        json j;
        j["name"] = v.name;
        j["status"] = std::string(to_string(v.status));
        if (v.measured) j["measured"] = number(*v.measured);
        if (v.expected) j["expected"] = number(*v.expected);
        if (v.tolerance) j["tolerance"] = number(*v.tolerance);
        if (!v.detail.empty()) j["detail"] = v.detail;
        vs.push_back(j);
    }
    out["verdicts"] = vs;
    if (!diagnostics_.empty()) out["diagnostics"] = diagnostics_;
    out["errors"] = errors_;
    out["artifacts"] = artifacts_;
    const int code = exit_code();
    out["overall"] = code == 0 ? "pass" : code == 2 ? "fail" : "error";
    return out;
}

Report::json Report::timing_json() const {
    json out = json::object();
    for (const auto& [phase, s] : timing_) out[phase] = s;
    return out;
}

void Report::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    auto dump = [&](const std::string& name, const json& j) {
        const auto path = (std::filesystem::path(dir) / name).string();
        std::ofstream out(path);
        if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path + "'");
        out << j.dump(2) << '\n';
    };
    dump("report.json", to_json());
    dump("timing.json", timing_json());
}

}  // namespace blowup
