#ifndef COOP_SCENARIO_HPP
#define COOP_SCENARIO_HPP

#include <nlohmann/json.hpp>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coop/generator.hpp"
#include "coop/integrator.hpp"
#include "coop/model.hpp"
#include "coop/oracles.hpp"
#include "coop/tolerance.hpp"

namespace coop {

enum class CheckKind { Metzler, M1, M2, Certificate, OracleCompare, EpsilonProbe };

std::string to_string(CheckKind kind);
CheckKind check_kind_from_string(const std::string& s);

/// x0 given literally or drawn by the generator ("interior" / "boundary").
struct GeneratedInitial {
    bool boundary = false;
    std::optional<std::uint64_t> seed;
};

/// One declarative verification run, loadable from a JSON document.
struct ScenarioSpec {
    std::string name;
    CoefficientMatrix system;
    std::optional<std::variant<Vector, GeneratedInitial>> x0;
    std::optional<double> t_end;
    StepperConfig stepper{};
    ToleranceProfile tolerances{};
    std::vector<CheckKind> checks;
    EpsilonSchedule epsilon_schedule{};
    std::optional<std::uint64_t> seed;
};

/// Parses a scenario document. Malformed JSON or schema violations throw
/// ParseError; inconsistent dimensions throw DimensionMismatch.
ScenarioSpec parse_scenario(const nlohmann::json& j, std::string name);
ScenarioSpec load_scenario(const std::filesystem::path& file);

/// System (window + body) serialization; parse(serialize(A)) reproduces A
/// bit-for-bit.
nlohmann::json system_to_json(const CoefficientMatrix& A);
CoefficientMatrix system_from_json(const nlohmann::json& window, const nlohmann::json& system);

nlohmann::json stepper_to_json(const StepperConfig& cfg);
StepperConfig stepper_from_json(const nlohmann::json& j);

}  // namespace coop

#endif
