// coop-odes: scenario-driven verification of linear cooperative ODE systems.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "coop/report.hpp"
#include "coop/runner.hpp"

namespace {

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("COOP_ODES_SEED");
    if (!raw || !*raw) return std::nullopt;
    try {
        return std::stoull(raw);
    } catch (const std::exception&) {
        throw coop::ParseError(std::string("COOP_ODES_SEED is not a valid unsigned integer: ") +
                               raw);
    }
}

int exit_of(const coop::ScenarioOutcome& outcome) { return static_cast<int>(outcome.exit); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification toolkit for linear cooperative systems x' = A(t) x"};
    app.require_subcommand(1);

    coop::RunOptions opts;
    std::string out_dir = ".";
    bool csv = false;
    double rel_tol = -1.0;
    double abs_tol = -1.0;
    app.add_option("--out", out_dir, "Directory for report and CSV files")->capture_default_str();
    app.add_flag("--csv", csv, "Also write CSV artifacts (trajectory, probe tables)");
    app.add_option("--rel-tol", rel_tol, "Override the rk45 relative tolerance");
    app.add_option("--abs-tol", abs_tol, "Override the rk45 absolute tolerance");

    std::string scenario_file;
    auto add_file_subcommand = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("file", scenario_file, "Scenario JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        return sub;
    };

    CLI::App* cmd_metzler =
        add_file_subcommand("check-metzler", "Check that the system is cooperative (Metzler)");
    CLI::App* cmd_solve = add_file_subcommand("solve", "Integrate the IVP and report the endpoint");
    CLI::App* cmd_verify =
        add_file_subcommand("verify", "Run the scenario's requested verification checks");
    CLI::App* cmd_oracle = add_file_subcommand(
        "oracle-compare", "Compare the integrator against the matrix exponential (constant A)");
    CLI::App* cmd_probe = add_file_subcommand(
        "probe-epsilon", "Tabulate continuous-dependence deviations for the epsilon schedule");

    CLI::App* cmd_fuzz =
        app.add_subcommand("fuzz", "Batch-verify generated systems and initial states");
    int fuzz_count = 100;
    std::uint64_t fuzz_seed = coop::GeneratorConfig{}.seed;
    bool non_cooperative = false;
    cmd_fuzz->add_option("--count", fuzz_count, "Number of generated instances")
        ->capture_default_str();
    cmd_fuzz->add_option("--seed", fuzz_seed, "Generator seed")->capture_default_str();
    cmd_fuzz->add_flag("--non-cooperative", non_cooperative,
                       "Generate non-cooperative systems (violations become findings)");

    CLI11_PARSE(app, argc, argv);

    try {
        opts.out_dir = out_dir;
        opts.write_csv = csv;
        if (rel_tol > 0) opts.rel_tol_override = rel_tol;
        if (abs_tol > 0) opts.abs_tol_override = abs_tol;
        opts.seed_override = seed_from_env();

        if (cmd_metzler->parsed()) {
            return exit_of(coop::run_check_metzler(scenario_file, opts));
        }
        if (cmd_solve->parsed()) {
            return exit_of(coop::run_solve(scenario_file, opts));
        }
        if (cmd_verify->parsed()) {
            return exit_of(coop::run_scenario(scenario_file, opts));
        }
        if (cmd_oracle->parsed()) {
            return exit_of(coop::run_oracle_compare(scenario_file, opts));
        }
        if (cmd_probe->parsed()) {
            return exit_of(coop::run_probe_epsilon(scenario_file, opts));
        }
        if (cmd_fuzz->parsed()) {
            coop::FuzzOptions fuzz;
            fuzz.count = fuzz_count;
            fuzz.generator.seed = opts.seed_override.value_or(fuzz_seed);
            fuzz.generator.cooperative = !non_cooperative;
            if (opts.rel_tol_override || opts.abs_tol_override) {
                auto& rk45 = std::get<coop::EmbeddedRk45>(fuzz.stepper.method);
                if (opts.rel_tol_override) rk45.rel_tol = *opts.rel_tol_override;
                if (opts.abs_tol_override) rk45.abs_tol = *opts.abs_tol_override;
            }
            const coop::FuzzSummary summary = coop::run_fuzz(fuzz);
            std::cout << summary.text();
            coop::write_report_json(opts.out_dir / "fuzz.report.json", summary.to_json(true));
            return summary.pass() ? 0 : 1;
        }
    } catch (const coop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
