#ifndef COOP_RUNNER_HPP
#define COOP_RUNNER_HPP

#include <nlohmann/json.hpp>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coop/generator.hpp"
#include "coop/scenario.hpp"
#include "coop/tolerance.hpp"

namespace coop {

enum class ExitCode : int { Ok = 0, VerificationFailed = 1, InputError = 2 };

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool write_csv = false;
    std::optional<double> rel_tol_override;  // applies to the rk45 stepper
    std::optional<double> abs_tol_override;
    std::optional<std::uint64_t> seed_override;  // wins over any scenario seed
};

struct ScenarioOutcome {
    ExitCode exit = ExitCode::Ok;
    nlohmann::json report;
    std::vector<std::filesystem::path> written;
};

/// Executes the scenario's requested checks in order, writes the report JSON
/// (and CSVs when asked) under out_dir, and maps the result onto the exit
/// code contract: 0 all checks pass, 1 some verification failed, 2 input or
/// schema error. Load-time errors (ParseError and friends) propagate to the
/// caller with nothing written; errors after loading still produce a report.
ScenarioOutcome run_scenario(const std::filesystem::path& file, const RunOptions& opts = {});

/// Single-check fronts for the corresponding CLI subcommands; same contract.
ScenarioOutcome run_check_metzler(const std::filesystem::path& file, const RunOptions& opts = {});
ScenarioOutcome run_solve(const std::filesystem::path& file, const RunOptions& opts = {});
ScenarioOutcome run_oracle_compare(const std::filesystem::path& file, const RunOptions& opts = {});
ScenarioOutcome run_probe_epsilon(const std::filesystem::path& file, const RunOptions& opts = {});

/// Agreement threshold for oracle-compare (integrator vs matrix exponential,
/// relative sup-norm; also bounds the cocycle defect).
inline constexpr double kOracleCompareTol = 1e-8;

struct FuzzOptions {
    int count = 100;
    GeneratorConfig generator{};
    StepperConfig stepper{};
    ToleranceProfile tolerances{};
    bool keep_instances = true;  // retain per-instance rows in the summary
};

struct FuzzInstance {
    std::uint64_t index = 0;
    std::uint64_t fingerprint = 0;
    Index n = 0;
    std::string body_kind;
    std::string x0_class;
    std::optional<bool> m1_holds;
    std::optional<bool> m2_holds;
    std::optional<std::string> certificate;
    std::optional<double> min_margin;
    double worst_m1_value = 0.0;
};

struct FuzzSummary {
    int count = 0;
    bool cooperative = true;
    int m1_checked = 0, m1_failed = 0;
    int m2_checked = 0, m2_failed = 0;
    int cert_checked = 0, cert_failed = 0;
    double min_margin = 0.0;      // over all certificate runs
    double worst_m1_value = 0.0;  // over all M1 runs
    std::size_t contradictions = 0;
    std::size_t notes = 0;
    std::vector<FuzzInstance> instances;

    /// Cooperative batches pass iff nothing failed; non-cooperative batches
    /// carry no pass obligation (violations are findings, not errors).
    bool pass() const;
    std::string text() const;
    nlohmann::json to_json(bool include_instances = false) const;
};

/// Generates count (system, x0) pairs and runs m1 everywhere, m2 and the
/// certificate on interior initial states. Deterministic in the options.
FuzzSummary run_fuzz(const FuzzOptions& opts);

}  // namespace coop

#endif
