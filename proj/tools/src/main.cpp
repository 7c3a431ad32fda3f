#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlms_app/catalog.hpp"
#include "rlms_app/checks.hpp"
#include "rlms_app/config.hpp"
#include "rlms_app/report.hpp"

namespace {

enum ExitCode : int { kSuccess = 0, kAssertionFailed = 1, kUsageError = 2 };

struct CommonOptions {
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

void add_common(CLI::App& cmd, CommonOptions& opts)
{
    cmd.add_option("--set", opts.overrides, "Override a config value, e.g. --set trials=20 (repeatable)")
        ->type_name("KEY=VALUE");
    cmd.add_option("--seed", opts.seed, "Replace the master seed");
    cmd.add_option("--threads", opts.threads, "Worker threads (0: RLMS_THREADS or hardware)");
}

int list_scenarios()
{
    for (const auto& b : rlms::app::builtin_scenarios()) {
        const auto config = rlms::app::parse_config(b.document);
        std::cout << b.name << "\t" << config.description << "\n";
    }
    return kSuccess;
}

void print_summary(const rlms::app::RunArtifacts& artifacts)
{
    for (const auto& t : artifacts.traces) {
        std::printf("%-24s steady-state MSD %8.3f dB\n", t.filter.c_str(), rlms::to_db(t.steady_state()));
    }
}

int run_scenario(const std::string& scenario, const std::string& out_dir, const CommonOptions& opts)
{
    const auto config = rlms::app::load_config(scenario, opts.overrides, opts.seed);
    const std::string dir = out_dir.empty() ? "results/" + config.scenario.name : out_dir;
    const auto artifacts = rlms::app::execute(config, {opts.threads});
    const auto written = rlms::app::write_outputs(dir, config, artifacts);
    print_summary(artifacts);
    for (const auto& path : written) {
        std::cout << "wrote " << path.string() << "\n";
    }
    return kSuccess;
}

int check_scenario(const std::string& name, const std::string& out_dir, const CommonOptions& opts)
{
    if (rlms::app::find_builtin(name) == nullptr || !rlms::app::has_checks(name)) {
        std::cerr << "error: '" << name << "' is not a built-in scenario with registered checks\n";
        return kUsageError;
    }
    const auto config = rlms::app::load_config(name, opts.overrides, opts.seed);
    const auto artifacts = rlms::app::execute(config, {opts.threads});
    if (!out_dir.empty()) {
        rlms::app::write_outputs(out_dir, config, artifacts);
    }
    print_summary(artifacts);
    bool all = true;
    for (const auto& a : rlms::app::evaluate_checks(name, config, artifacts)) {
        std::cout << rlms::app::format_assertion(a) << "\n";
        all = all && a.passed;
    }
    std::cout << (all ? "PASS " : "FAIL ") << name << "\n";
    return all ? kSuccess : kAssertionFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regularized LMS/NLMS adaptive filter experiments"};
    app.require_subcommand(1);

    app.add_subcommand("list", "List the built-in scenarios");

    CommonOptions run_opts;
    std::string run_target;
    std::string run_out;
    auto* run = app.add_subcommand("run", "Run a scenario and write its MSD tables");
    run->add_option("scenario", run_target, "Built-in name or path to a JSON config")->required();
    run->add_option("--out", run_out, "Output directory (default results/<name>)");
    add_common(*run, run_opts);

    CommonOptions check_opts;
    std::string check_target;
    std::string check_out;
    auto* check = app.add_subcommand("check", "Run a built-in scenario and evaluate its assertions");
    check->add_option("scenario", check_target, "Built-in name")->required();
    check->add_option("--out", check_out, "Also write the run's tables here");
    add_common(*check, check_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (app.got_subcommand("list")) {
            return list_scenarios();
        }
        if (run->parsed()) {
            return run_scenario(run_target, run_out, run_opts);
        }
        return check_scenario(check_target, check_out, check_opts);
    } catch (const rlms::app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const rlms::app::OutputError& e) {
        std::cerr << "output error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kUsageError;
}
