#pragma once

#include "blowup/asymptotics.hpp"
#include "blowup/config.hpp"
#include "blowup/report.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace blowup {

struct CommandOptions {
    std::string out_dir = "out";
    int jobs = 1;
    XiVariant variant = XiVariant::TheoremNumerator2;
    std::string tolerance_overrides;
    bool dump_phi_cache = false;
};

const std::vector<std::string>& command_names();

// Runs one command on a parsed config and returns the assembled report. Execution errors
// are recorded in the report (partial results kept) rather than thrown.
Report run_command(const std::string& name, Config cfg, const CommandOptions& opt);

// Loads the config, runs, writes report.json/timing.json and data files into opt.out_dir,
// prints a one-line summary per verdict to `log`. Returns the process exit code.
int run_cli(const std::string& name, const std::string& config_path, const CommandOptions& opt,
            std::ostream& log);

}  // namespace blowup
