#ifndef COOP_REPORT_HPP
#define COOP_REPORT_HPP

#include <nlohmann/json.hpp>
#include <filesystem>
#include <string>

#include "coop/certificates.hpp"
#include "coop/integrator.hpp"
#include "coop/model.hpp"
#include "coop/oracles.hpp"

namespace coop {

/// Shortest-exact decimal would do, but a fixed 17 significant digits keeps
/// CSV columns aligned across writers and still round-trips every double.
std::string format_g17(double v);

std::string to_string(CertVerdict v);
std::string to_string(OrthantTag t);

nlohmann::json certificate_to_json(const CertificateReport& report);
nlohmann::json verdict_to_json(const MonotonicityVerdict& verdict);
nlohmann::json cooperativity_to_json(const CooperativityReport& report);

/// Serializes with sorted keys and a trailing newline; loading the file and
/// re-serializing reproduces it byte for byte.
void write_report_json(const std::filesystem::path& file, const nlohmann::json& report);
std::string report_to_string(const nlohmann::json& report);

/// Columns: t, x_1..x_n, xi, bound, margin. Header row mandatory.
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj,
                          const ToleranceProfile& tol = {});

/// Columns: eps, deviation.
void write_dependence_csv(const std::filesystem::path& file,
                          const std::vector<DependenceRow>& table);

}  // namespace coop

#endif
