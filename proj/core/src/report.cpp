#include "coop/report.hpp"

#include <cstdio>
#include <fstream>

namespace coop {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_string(CertVerdict v) {
    switch (v) {
        case CertVerdict::CertifiedPositive: return "certified-positive";
        case CertVerdict::ViolationFound: return "violation-found";
        case CertVerdict::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

std::string to_string(OrthantTag t) {
    switch (t) {
        case OrthantTag::Interior: return "interior";
        case OrthantTag::BoundaryNonnegative: return "boundary-nonnegative";
        case OrthantTag::Outside: return "outside";
    }
    return "unknown";
}

json certificate_to_json(const CertificateReport& report) {
    json j;
    j["verdict"] = to_string(report.verdict);
    j["samples"] = report.times.size();
    j["min_margin"] = report.min_margin();
    if (report.first_violation_time) {
        j["first_violation_time"] = *report.first_violation_time;
    } else {
        j["first_violation_time"] = nullptr;
    }
    j["xi_initial"] = report.xi.empty() ? 0.0 : report.xi.front();
    j["xi_final"] = report.xi.empty() ? 0.0 : report.xi.back();
    j["bound_final"] = report.bound.empty() ? 0.0 : report.bound.back();
    return j;
}

json verdict_to_json(const MonotonicityVerdict& verdict) {
    json j;
    j["property"] = verdict.property == MonotoneProperty::M1 ? "m1" : "m2";
    j["holds"] = verdict.holds;
    j["worst_time"] = verdict.worst_time;
    j["worst_coordinate"] = verdict.worst_coordinate;
    j["worst_value"] = verdict.worst_value;
    return j;
}

json cooperativity_to_json(const CooperativityReport& report) {
    json j;
    j["cooperative"] = report.cooperative;
    json violations = json::array();
    // Cap the echo; violation lists from dense sampling can be long.
    const std::size_t cap = 32;
    for (std::size_t k = 0; k < report.violations.size() && k < cap; ++k) {
        const auto& v = report.violations[k];
        violations.push_back({{"t", v.t}, {"i", v.i}, {"j", v.j}, {"value", v.value}});
    }
    j["violations"] = std::move(violations);
    j["violation_count"] = report.violations.size();
    return j;
}

std::string report_to_string(const json& report) { return report.dump(2) + "\n"; }

void write_report_json(const std::filesystem::path& file, const json& report) {
    std::ofstream out(file);
    if (!out) {
        throw Error("cannot write report file: " + file.string());
    }
    out << report_to_string(report);
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj,
                          const ToleranceProfile& tol) {
    std::ofstream out(file);
    if (!out) {
        throw Error("cannot write CSV file: " + file.string());
    }
    const Index n = traj.dimension();
    out << "t";
    for (Index i = 1; i <= n; ++i) {
        out << ",x_" << i;
    }
    out << ",xi,bound,margin\n";
    if (traj.empty()) return;

    const auto xi = product_series(traj);
    const auto bound = trace_bound_series(traj);
    const double floor = std::max(tol.abs_tol, 1e-300);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_g17(traj.times()[k]);
        const Vector& x = traj.states()[k];
        for (Index i = 0; i < n; ++i) {
            out << ',' << format_g17(x(i));
        }
        const double margin =
            (xi.xi[k] - bound.bound[k]) / std::max(std::abs(bound.bound[k]), floor);
        out << ',' << format_g17(xi.xi[k]) << ',' << format_g17(bound.bound[k]) << ','
            << format_g17(margin) << '\n';
    }
}

void write_dependence_csv(const std::filesystem::path& file,
                          const std::vector<DependenceRow>& table) {
    std::ofstream out(file);
    if (!out) {
        throw Error("cannot write CSV file: " + file.string());
    }
    out << "eps,deviation\n";
    for (const auto& row : table) {
        out << format_g17(row.eps) << ',' << format_g17(row.deviation) << '\n';
    }
}

}  // namespace coop
