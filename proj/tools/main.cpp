#include "blowup/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace blowup;
    CLI::App app{"Boundary blow-up rates for weighted p-Laplacian radial problems"};
    app.set_version_flag("--version", std::string(kArtifactName) + " " + kArtifactVersion);
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions opt;
    std::string variant = "theorem";
    const std::map<std::string, std::string> about = {
        {"predict", "closed-form rate, constants and expansions"},
        {"solve", "write a radial profile (large, Dirichlet or shot)"},
        {"verify-first-order", "fit rates and constants against predictions"},
        {"verify-second-order", "fit the second-order correction"},
        {"karamata-probe", "index and limits of a Karamata function"},
        {"ko-check", "Keller-Osserman convergence"},
        {"adjudicate", "compare xi0 variants on a p != 2 family"},
    };

    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
        sub->add_option("--config", config_path, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--variant", variant, "xi numerator variant")
            ->check(CLI::IsMember({"theorem", "proof"}))
            ->capture_default_str();
        sub->add_option("--tolerance-overrides", opt.tolerance_overrides,
                        "comma-separated section.key=value overrides");
        sub->add_flag("--dump-phi-cache", opt.dump_phi_cache, "write phi_cache.csv");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 returns 0 for --help/--version and 106/109 etc. for usage errors.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    opt.variant = variant == "proof" ? XiVariant::ProofNumeratorP : XiVariant::TheoremNumerator2;
    const std::string name = app.get_subcommands().front()->get_name();
    return run_cli(name, config_path, opt, std::cout);
}
