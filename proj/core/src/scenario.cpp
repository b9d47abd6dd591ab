#include "coop/scenario.hpp"

#include <fstream>

namespace coop {

using nlohmann::json;

std::string to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::Metzler: return "metzler";
        case CheckKind::M1: return "m1";
        case CheckKind::M2: return "m2";
        case CheckKind::Certificate: return "certificate";
        case CheckKind::OracleCompare: return "oracle-compare";
        case CheckKind::EpsilonProbe: return "epsilon-probe";
    }
    return "unknown";
}

CheckKind check_kind_from_string(const std::string& s) {
    if (s == "metzler") return CheckKind::Metzler;
    if (s == "m1") return CheckKind::M1;
    if (s == "m2") return CheckKind::M2;
    if (s == "certificate") return CheckKind::Certificate;
    if (s == "oracle-compare") return CheckKind::OracleCompare;
    if (s == "epsilon-probe") return CheckKind::EpsilonProbe;
    throw ParseError("unknown check kind: " + s);
}

namespace {

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) {
        throw ParseError(std::string(what) + ": expected a nonempty array of rows");
    }
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ParseError(std::string(what) + ": ragged rows");
        }
        for (Index c = 0; c < cols; ++c) {
            m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

CoefficientMatrix system_from_json(const json& window, const json& system) {
    TimeWindow tw(window.at("a").get<double>(), window.at("b").get<double>(),
                  window.at("t0").get<double>());
    const std::string type = system.at("type").get<std::string>();
    MatrixBody body;
    if (type == "constant") {
        body = ConstantBody{matrix_from_json(system.at("entries"), "constant entries")};
    } else if (type == "piecewise_constant") {
        PiecewiseConstantBody b;
        b.breakpoints = system.at("breakpoints").get<std::vector<double>>();
        for (const auto& piece : system.at("pieces")) {
            b.pieces.push_back(matrix_from_json(piece, "piecewise piece"));
        }
        body = std::move(b);
    } else if (type == "polynomial") {
        PolynomialBody b;
        const auto& rows = system.at("coefficients");
        b.n = static_cast<Index>(rows.size());
        for (const auto& row : rows) {
            if (static_cast<Index>(row.size()) != b.n) {
                throw ParseError("polynomial coefficients: expected an n x n array of arrays");
            }
            for (const auto& entry : row) {
                b.coefficients.push_back(entry.get<std::vector<double>>());
            }
        }
        body = std::move(b);
    } else if (type == "sampled_grid") {
        SampledGridBody b;
        b.grid = system.at("grid").get<std::vector<double>>();
        for (const auto& node : system.at("nodes")) {
            b.nodes.push_back(matrix_from_json(node, "grid node"));
        }
        body = std::move(b);
    } else {
        throw ParseError("unknown system type: " + type);
    }
    return CoefficientMatrix(tw, std::move(body));
}

json system_to_json(const CoefficientMatrix& A) {
    json out;
    out["window"] = {{"a", A.window().a()}, {"b", A.window().b()}, {"t0", A.window().t0()}};
    json sys;
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                sys["type"] = "constant";
                sys["entries"] = matrix_to_json(b.entries);
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                sys["type"] = "piecewise_constant";
                sys["breakpoints"] = b.breakpoints;
                json pieces = json::array();
                for (const Matrix& p : b.pieces) pieces.push_back(matrix_to_json(p));
                sys["pieces"] = std::move(pieces);
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                sys["type"] = "polynomial";
                json rows = json::array();
                for (Index i = 0; i < b.n; ++i) {
                    json row = json::array();
                    for (Index j = 0; j < b.n; ++j) {
                        row.push_back(b.poly(i, j));
                    }
                    rows.push_back(std::move(row));
                }
                sys["coefficients"] = std::move(rows);
            } else {
                sys["type"] = "sampled_grid";
                sys["grid"] = b.grid;
                json nodes = json::array();
                for (const Matrix& m : b.nodes) nodes.push_back(matrix_to_json(m));
                sys["nodes"] = std::move(nodes);
            }
        },
        A.body());
    out["system"] = std::move(sys);
    return out;
}

StepperConfig stepper_from_json(const json& j) {
    StepperConfig cfg;
    const std::string method = j.value("method", std::string("rk45"));
    if (method == "rk4") {
        FixedRk4 rk4;
        rk4.step = j.at("step").get<double>();
        cfg.method = rk4;
    } else if (method == "rk45") {
        EmbeddedRk45 rk45;
        rk45.rel_tol = j.value("rel_tol", rk45.rel_tol);
        rk45.abs_tol = j.value("abs_tol", rk45.abs_tol);
        rk45.initial_step = j.value("initial_step", rk45.initial_step);
        rk45.min_step = j.value("min_step", rk45.min_step);
        rk45.max_step = j.value("max_step", rk45.max_step);
        cfg.method = rk45;
    } else {
        throw ParseError("unknown stepper method: " + method);
    }
    cfg.max_steps = j.value("max_steps", cfg.max_steps);
    cfg.validate();
    return cfg;
}

json stepper_to_json(const StepperConfig& cfg) {
    json j;
    if (const auto* rk4 = std::get_if<FixedRk4>(&cfg.method)) {
        j["method"] = "rk4";
        j["step"] = rk4->step;
    } else {
        const auto& rk45 = std::get<EmbeddedRk45>(cfg.method);
        j["method"] = "rk45";
        j["rel_tol"] = rk45.rel_tol;
        j["abs_tol"] = rk45.abs_tol;
        j["initial_step"] = rk45.initial_step;
        j["min_step"] = rk45.min_step;
        j["max_step"] = rk45.max_step;
    }
    j["max_steps"] = cfg.max_steps;
    return j;
}

ScenarioSpec parse_scenario(const json& j, std::string name) {
    try {
        CoefficientMatrix system = system_from_json(j.at("window"), j.at("system"));
        ScenarioSpec spec{.name = std::move(name), .system = std::move(system)};

        if (j.contains("x0")) {
            const auto& jx = j.at("x0");
            if (jx.is_array()) {
                const auto values = jx.get<std::vector<double>>();
                Vector x(static_cast<Index>(values.size()));
                for (Index i = 0; i < x.size(); ++i) {
                    x(i) = values[static_cast<std::size_t>(i)];
                }
                if (x.size() != spec.system.dimension()) {
                    throw DimensionMismatch("x0 has length " + std::to_string(x.size()) +
                                            ", system dimension is " +
                                            std::to_string(spec.system.dimension()));
                }
                spec.x0 = x;
            } else if (jx.is_object()) {
                GeneratedInitial gen;
                const std::string mode = jx.at("generate").get<std::string>();
                if (mode == "boundary") {
                    gen.boundary = true;
                } else if (mode != "interior") {
                    throw ParseError("x0.generate must be \"interior\" or \"boundary\"");
                }
                if (jx.contains("seed")) gen.seed = jx.at("seed").get<std::uint64_t>();
                spec.x0 = gen;
            } else {
                throw ParseError("x0 must be an array or a generator directive");
            }
        }

        if (j.contains("t_end")) {
            const double t_end = j.at("t_end").get<double>();
            if (!(t_end > spec.system.window().t0() && t_end < spec.system.window().b())) {
                throw ParseError("t_end must satisfy t0 < t_end < b");
            }
            spec.t_end = t_end;
        }
        if (j.contains("stepper")) spec.stepper = stepper_from_json(j.at("stepper"));
        if (j.contains("tolerances")) {
            const auto& jt = j.at("tolerances");
            spec.tolerances.abs_tol = jt.value("abs_tol", spec.tolerances.abs_tol);
            spec.tolerances.strict_tol = jt.value("strict_tol", spec.tolerances.strict_tol);
            spec.tolerances.rel_cert_tol = jt.value("rel_cert_tol", spec.tolerances.rel_cert_tol);
            spec.tolerances.metzler_tol = jt.value("metzler_tol", spec.tolerances.metzler_tol);
            spec.tolerances.validate();
        }
        if (j.contains("checks")) {
            for (const auto& c : j.at("checks")) {
                spec.checks.push_back(check_kind_from_string(c.get<std::string>()));
            }
        }
        if (j.contains("epsilon_schedule")) {
            spec.epsilon_schedule.values = j.at("epsilon_schedule").get<std::vector<double>>();
            spec.epsilon_schedule.validate();
        }
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario schema error: ") + e.what());
    }
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ParseError("cannot open scenario file: " + file.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON in ") + file.string() + ": " + e.what());
    }
    return parse_scenario(j, file.stem().string());
}

}  // namespace coop
