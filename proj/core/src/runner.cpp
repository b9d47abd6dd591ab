#include "coop/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coop/certificates.hpp"
#include "coop/oracles.hpp"
#include "coop/report.hpp"

namespace coop {

using nlohmann::json;

namespace {

const char* body_kind_name(const MatrixBody& body) {
    switch (body.index()) {
        case 0: return "constant";
        case 1: return "piecewise_constant";
        case 2: return "polynomial";
        case 3: return "sampled_grid";
    }
    return "unknown";
}

StepperConfig apply_overrides(StepperConfig cfg, const RunOptions& opts) {
    if (auto* rk45 = std::get_if<EmbeddedRk45>(&cfg.method)) {
        if (opts.rel_tol_override) rk45->rel_tol = *opts.rel_tol_override;
        if (opts.abs_tol_override) rk45->abs_tol = *opts.abs_tol_override;
    }
    cfg.validate();
    return cfg;
}

Vector resolve_x0(const ScenarioSpec& spec, const RunOptions& opts) {
    if (!spec.x0) {
        throw ParseError("scenario requires x0 for the requested checks");
    }
    if (const auto* literal = std::get_if<Vector>(&*spec.x0)) {
        return *literal;
    }
    const auto& gen = std::get<GeneratedInitial>(*spec.x0);
    GeneratorConfig cfg;
    cfg.boundary_fraction = gen.boundary ? 1.0 : 0.0;
    if (opts.seed_override) {
        cfg.seed = *opts.seed_override;
    } else if (gen.seed) {
        cfg.seed = *gen.seed;
    } else if (spec.seed) {
        cfg.seed = *spec.seed;
    }
    return gen_initial(cfg, spec.system.dimension());
}

double require_t_end(const ScenarioSpec& spec) {
    if (!spec.t_end) {
        throw ParseError("scenario requires t_end for the requested checks");
    }
    return *spec.t_end;
}

bool needs_trajectory(CheckKind kind) {
    return kind == CheckKind::M1 || kind == CheckKind::M2 || kind == CheckKind::Certificate;
}

double rel_supnorm_diff(const Matrix& got, const Matrix& want) {
    const double scale = std::max(want.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    return (got - want).cwiseAbs().rowwise().sum().maxCoeff() / scale;
}

ScenarioOutcome run_with_checks(const std::filesystem::path& file, const RunOptions& opts,
                                const std::optional<std::vector<CheckKind>>& forced_checks,
                                bool always_solve) {
    ScenarioSpec spec = load_scenario(file);  // load errors propagate: exit 2, nothing written

    ScenarioOutcome outcome;
    json& report = outcome.report;
    report["scenario"] = spec.name;
    report["input"] = system_to_json(spec.system);

    const auto finalize = [&](ExitCode code) {
        report["exit"] = static_cast<int>(code);
        const auto path = opts.out_dir / (spec.name + ".report.json");
        write_report_json(path, report);
        outcome.written.push_back(path);
        outcome.exit = code;
        return outcome;
    };

    try {
        const StepperConfig stepper = apply_overrides(spec.stepper, opts);
        const ToleranceProfile& tol = spec.tolerances;

        std::vector<CheckKind> checks = forced_checks ? *forced_checks : spec.checks;

        std::optional<Vector> x0;
        std::optional<Trajectory> traj;
        const bool want_traj =
            always_solve || std::any_of(checks.begin(), checks.end(), needs_trajectory);
        if (spec.x0 && (want_traj || checks.empty())) {
            x0 = resolve_x0(spec, opts);
        }
        if (checks.empty() && !forced_checks) {
            // Default check set, adapted to the initial data when present.
            checks.push_back(CheckKind::Metzler);
            if (x0) {
                checks.push_back(CheckKind::M1);
                if (classify_orthant(*x0, tol).tag == OrthantTag::Interior) {
                    checks.push_back(CheckKind::M2);
                    checks.push_back(CheckKind::Certificate);
                }
            }
        }

        if (want_traj || std::any_of(checks.begin(), checks.end(), needs_trajectory)) {
            if (!x0) x0 = resolve_x0(spec, opts);
            traj = solve_ivp(spec.system, spec.system.window().t0(), *x0, require_t_end(spec),
                             stepper);
        }

        if (x0) {
            json jx = json::array();
            for (Index i = 0; i < x0->size(); ++i) jx.push_back((*x0)(i));
            report["x0"] = std::move(jx);
            report["x0_class"] = to_string(classify_orthant(*x0, tol).tag);
        }
        if (traj) {
            report["t0"] = traj->times().front();
            report["t_end"] = traj->times().back();
            report["steps"] = traj->size() - 1;
            json fin = json::array();
            for (Index i = 0; i < traj->states().back().size(); ++i) {
                fin.push_back(traj->states().back()(i));
            }
            report["final_state"] = std::move(fin);
        }

        bool failed = false;
        json results = json::array();
        for (CheckKind kind : checks) {
            json entry;
            entry["check"] = to_string(kind);
            switch (kind) {
                case CheckKind::Metzler: {
                    const auto coop = is_cooperative(spec.system, {}, tol);
                    entry.update(cooperativity_to_json(coop));
                    entry["pass"] = coop.cooperative;
                    failed = failed || !coop.cooperative;
                    break;
                }
                case CheckKind::M1: {
                    const auto v = check_m1(*traj, tol);
                    entry.update(verdict_to_json(v));
                    entry["pass"] = v.holds;
                    failed = failed || !v.holds;
                    break;
                }
                case CheckKind::M2: {
                    const auto v = check_m2(*traj, tol);
                    entry.update(verdict_to_json(v));
                    entry["pass"] = v.holds;
                    failed = failed || !v.holds;
                    break;
                }
                case CheckKind::Certificate: {
                    const auto cert = check_certificate(*traj, tol);
                    entry.update(certificate_to_json(cert));
                    entry["pass"] = cert.verdict != CertVerdict::ViolationFound;
                    failed = failed || cert.verdict == CertVerdict::ViolationFound;
                    break;
                }
                case CheckKind::OracleCompare: {
                    const auto* constant = std::get_if<ConstantBody>(&spec.system.body());
                    if (!constant) {
                        throw PreconditionViolated(
                            "oracle-compare requires a constant-coefficient system");
                    }
                    const double t0 = spec.system.window().t0();
                    const double t2 = require_t_end(spec);
                    const double t1 = 0.5 * (t0 + t2);
                    const Matrix phi = fundamental_matrix(spec.system, t0, t2, stepper);
                    const Matrix reference = expm((t2 - t0) * constant->entries);
                    const double deviation = rel_supnorm_diff(phi, reference);
                    const Matrix chained = fundamental_matrix(spec.system, t1, t2, stepper) *
                                           fundamental_matrix(spec.system, t0, t1, stepper);
                    const double cocycle = rel_supnorm_diff(chained, phi);
                    entry["relative_deviation"] = deviation;
                    entry["cocycle_defect"] = cocycle;
                    entry["tolerance"] = kOracleCompareTol;
                    const bool ok = deviation <= kOracleCompareTol && cocycle <= kOracleCompareTol;
                    entry["pass"] = ok;
                    failed = failed || !ok;
                    break;
                }
                case CheckKind::EpsilonProbe: {
                    if (!x0) x0 = resolve_x0(spec, opts);
                    const auto table = continuous_dependence_probe(
                        spec.system, *x0, spec.system.window().t0(), require_t_end(spec),
                        spec.epsilon_schedule, stepper);
                    json jt = json::array();
                    for (const auto& row : table) {
                        jt.push_back({{"eps", row.eps}, {"deviation", row.deviation}});
                    }
                    entry["table"] = std::move(jt);
                    entry["pass"] = true;  // informational: tabulated, not enforced
                    if (opts.write_csv) {
                        const auto path = opts.out_dir / (spec.name + ".epsilon.csv");
                        write_dependence_csv(path, table);
                        outcome.written.push_back(path);
                    }
                    break;
                }
            }
            results.push_back(std::move(entry));
        }
        report["results"] = std::move(results);
        report["pass"] = !failed;

        if (opts.write_csv && traj) {
            const auto path = opts.out_dir / (spec.name + ".trajectory.csv");
            write_trajectory_csv(path, *traj, tol);
            outcome.written.push_back(path);
        }
        return finalize(failed ? ExitCode::VerificationFailed : ExitCode::Ok);
    } catch (const Error& e) {
        // The scenario parsed but could not be executed (bad preconditions,
        // stepper failure): still leave a machine-readable trace behind.
        report["error"] = e.what();
        report["pass"] = false;
        return finalize(ExitCode::InputError);
    }
}

}  // namespace

ScenarioOutcome run_scenario(const std::filesystem::path& file, const RunOptions& opts) {
    return run_with_checks(file, opts, std::nullopt, false);
}

ScenarioOutcome run_check_metzler(const std::filesystem::path& file, const RunOptions& opts) {
    return run_with_checks(file, opts, std::vector<CheckKind>{CheckKind::Metzler}, false);
}

ScenarioOutcome run_solve(const std::filesystem::path& file, const RunOptions& opts) {
    return run_with_checks(file, opts, std::vector<CheckKind>{}, true);
}

ScenarioOutcome run_oracle_compare(const std::filesystem::path& file, const RunOptions& opts) {
    return run_with_checks(file, opts, std::vector<CheckKind>{CheckKind::OracleCompare}, false);
}

ScenarioOutcome run_probe_epsilon(const std::filesystem::path& file, const RunOptions& opts) {
    return run_with_checks(file, opts, std::vector<CheckKind>{CheckKind::EpsilonProbe}, false);
}

bool FuzzSummary::pass() const {
    if (!cooperative) return true;
    return m1_failed == 0 && m2_failed == 0 && cert_failed == 0 && contradictions == 0;
}

std::string FuzzSummary::text() const {
    std::ostringstream os;
    os << "fuzz summary\n";
    os << "  count: " << count << "\n";
    os << "  cooperative: " << (cooperative ? "true" : "false") << "\n";
    os << "  m1: " << (m1_checked - m1_failed) << " pass / " << m1_failed << " fail ("
       << m1_checked << " checked)\n";
    os << "  m2: " << (m2_checked - m2_failed) << " pass / " << m2_failed << " fail ("
       << m2_checked << " checked)\n";
    os << "  certificate: " << (cert_checked - cert_failed) << " pass / " << cert_failed
       << " fail (" << cert_checked << " checked)\n";
    os << "  min certificate margin: " << format_g17(min_margin) << "\n";
    os << "  worst m1 value: " << format_g17(worst_m1_value) << "\n";
    os << "  contradictions: " << contradictions << "\n";
    os << "  notes: " << notes << "\n";
    os << "  result: " << (pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

json FuzzSummary::to_json(bool include_instances) const {
    json j;
    j["count"] = count;
    j["cooperative"] = cooperative;
    j["m1"] = {{"checked", m1_checked}, {"failed", m1_failed}};
    j["m2"] = {{"checked", m2_checked}, {"failed", m2_failed}};
    j["certificate"] = {{"checked", cert_checked}, {"failed", cert_failed}};
    j["min_margin"] = min_margin;
    j["worst_m1_value"] = worst_m1_value;
    j["contradictions"] = contradictions;
    j["notes"] = notes;
    j["pass"] = pass();
    if (include_instances) {
        json rows = json::array();
        for (const auto& inst : instances) {
            json r;
            r["index"] = inst.index;
            r["fingerprint"] = inst.fingerprint;
            r["n"] = inst.n;
            r["body"] = inst.body_kind;
            r["x0_class"] = inst.x0_class;
            if (inst.m1_holds) r["m1_holds"] = *inst.m1_holds;
            if (inst.m2_holds) r["m2_holds"] = *inst.m2_holds;
            if (inst.certificate) r["certificate"] = *inst.certificate;
            if (inst.min_margin) r["min_margin"] = *inst.min_margin;
            r["worst_m1_value"] = inst.worst_m1_value;
            rows.push_back(std::move(r));
        }
        j["instances"] = std::move(rows);
    }
    return j;
}

FuzzSummary run_fuzz(const FuzzOptions& opts) {
    if (opts.count < 1) {
        throw InvalidConfig("run_fuzz: count must be >= 1");
    }
    opts.generator.validate();
    opts.stepper.validate();
    opts.tolerances.validate();

    FuzzSummary summary;
    summary.count = opts.count;
    summary.cooperative = opts.generator.cooperative;
    summary.min_margin = std::numeric_limits<double>::infinity();
    summary.worst_m1_value = std::numeric_limits<double>::infinity();

    for (int k = 0; k < opts.count; ++k) {
        const auto instance = static_cast<std::uint64_t>(k);
        const CoefficientMatrix system = gen_system(opts.generator, instance);
        const Vector x0 = gen_initial(opts.generator, system.dimension(), instance);
        const Trajectory traj =
            solve_ivp(system, kGeneratedT0, x0, kGeneratedTEnd, opts.stepper);

        FuzzInstance row;
        row.index = instance;
        row.fingerprint = system.fingerprint();
        row.n = system.dimension();
        row.body_kind = body_kind_name(system.body());
        const auto cls = classify_orthant(x0, opts.tolerances);
        row.x0_class = to_string(cls.tag);

        RunRecord record;
        record.system_fingerprint = row.fingerprint;

        const auto m1 = check_m1(traj, opts.tolerances);
        ++summary.m1_checked;
        if (!m1.holds) ++summary.m1_failed;
        summary.worst_m1_value = std::min(summary.worst_m1_value, m1.worst_value);
        row.m1_holds = m1.holds;
        row.worst_m1_value = m1.worst_value;
        record.m1 = m1;

        if (cls.tag == OrthantTag::Interior) {
            const auto m2 = check_m2(traj, opts.tolerances);
            ++summary.m2_checked;
            if (!m2.holds) ++summary.m2_failed;
            row.m2_holds = m2.holds;
            record.m2 = m2;

            const auto cert = check_certificate(traj, opts.tolerances);
            ++summary.cert_checked;
            if (cert.verdict == CertVerdict::ViolationFound) ++summary.cert_failed;
            summary.min_margin = std::min(summary.min_margin, cert.min_margin());
            row.certificate = to_string(cert.verdict);
            row.min_margin = cert.min_margin();
            record.certificate = cert.verdict;
        }

        const auto consistency =
            implies_check(system, std::span<const RunRecord>(&record, 1), {}, opts.tolerances);
        summary.contradictions += consistency.contradictions.size();
        summary.notes += consistency.notes.size();

        if (opts.keep_instances) {
            summary.instances.push_back(std::move(row));
        }
    }
    return summary;
}

}  // namespace coop
