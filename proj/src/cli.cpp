#include "gct/cli.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace gct::cli {

namespace {

using io::json;

std::vector<std::pair<std::string, std::string>> echo_comments(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> lines;
    const json echo = config_echo(cfg);
    for (auto it = echo.begin(); it != echo.end(); ++it) {
        lines.emplace_back(it.key(), it.value().is_string()
                                         ? it.value().get<std::string>()
                                         : it.value().dump());
    }
    return lines;
}

DescentOptions descent_options(const RunConfig& cfg) {
    DescentOptions opts;
    opts.step0 = cfg.step0;
    opts.grad_tol = cfg.grad_tol;
    opts.max_iter = cfg.max_iter;
    opts.divergence_floor = cfg.divergence_floor;
    return opts;
}

const char* status_name(DescentStatus status) {
    switch (status) {
        case DescentStatus::Converged: return "converged";
        case DescentStatus::MaxIterations: return "max_iterations";
        case DescentStatus::NumericalFloor: return "numerical_floor";
        case DescentStatus::DivergenceSuspected: return "divergence_suspected";
    }
    return "unknown";
}

std::string side_file(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
    return stem + suffix;
}

} // namespace

void validate(const RunConfig& cfg) {
    if (cfg.n < 1) throw InputError("config: n must be positive");
    if (cfg.steps < 1) throw InputError("config: steps must be positive");
    if (cfg.t_grid < 2) throw InputError("config: t-grid must have at least 2 points");
    if (cfg.trials < 1) throw InputError("config: trials must be positive");
    if (cfg.max_iter < 1) throw InputError("config: max-iter must be positive");
    if (!(cfg.grad_tol > 0.0)) throw InputError("config: grad-tol must be positive");
    if (!(cfg.step0 > 0.0)) throw InputError("config: step must be positive");
    if (cfg.alt_iters < 1) throw InputError("config: alt-iters must be positive");
    if (cfg.gaussians < 0) throw InputError("config: gaussians must be non-negative");
    if (cfg.fd_step < 0.0) throw InputError("config: fd-step must be non-negative");
}

json config_echo(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["manifold"] = cfg.manifold;
    j["n"] = cfg.n;
    j["p"] = cfg.p_arg;
    j["q"] = cfg.q_arg;
    j["input"] = cfg.input_path;
    j["output"] = cfg.output_path;
    j["fn"] = cfg.fn;
    j["mode"] = cfg.mode;
    j["steps"] = cfg.steps;
    j["t_grid"] = cfg.t_grid;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["max_iter"] = cfg.max_iter;
    j["grad_tol"] = cfg.grad_tol;
    j["step0"] = cfg.step0;
    j["divergence_floor"] = cfg.divergence_floor;
    j["alt_iters"] = cfg.alt_iters;
    j["gaussians"] = cfg.gaussians;
    j["fd_step"] = cfg.fd_step;
    return j;
}

Point parse_point_arg(ManifoldKind kind, const std::string& arg) {
    if (arg.empty()) throw InputError("missing point argument");
    if (kind == ManifoldKind::SpdCone) {
        const SpdMatrix p = io::read_spd_file(arg);
        return Point(ManifoldSpec{kind, p.order()}, p);
    }
    std::vector<double> values;
    std::stringstream ss(arg);
    std::string item;
    int field = 0;
    while (std::getline(ss, item, ',')) {
        ++field;
        try {
            size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw InputError("cannot parse coordinate " + std::to_string(field) + " in '" +
                             arg + "'");
        }
    }
    if (values.empty()) throw InputError("empty point argument");
    Eigen::VectorXd coords(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) coords(static_cast<Eigen::Index>(i)) = values[i];
    return Point(ManifoldSpec{kind, static_cast<int>(values.size())}, coords);
}

int run_geodesic(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    const ManifoldKind kind = manifold_kind_from_string(cfg.manifold);
    const Point p = parse_point_arg(kind, cfg.p_arg);
    const Point q = parse_point_arg(kind, cfg.q_arg);
    const ManifoldSpec m = p.manifold();
    if (!(q.manifold() == m)) throw InputError("geodesic: p and q live on different manifolds");

    const CurveTrace closed = sample_closed_form_geodesic(p, q, cfg.steps + 1);
    const Eigen::VectorXd p0 = point_to_frame(p);
    const Eigen::VectorXd v0 = tangent_to_frame(log_map(p, q));
    const CurveTrace ode = geodesic_ode_solve(christoffel_source_of(m), p0, v0, 1.0, cfg.steps,
                                              validity_guard_of(m));

    double max_dev = 0.0;
    for (size_t s = 0; s < closed.size(); ++s) {
        max_dev = std::max(max_dev, (closed.points[s] - ode.points[s]).norm());
    }

    std::ostringstream csv;
    for (const auto& [key, value] : echo_comments(cfg)) csv << "# " << key << "=" << value << "\n";
    const int d = m.dim();
    csv << "t";
    for (int i = 1; i <= d; ++i) csv << ",x_" << i;
    for (int i = 1; i <= d; ++i) csv << ",v_" << i;
    for (int i = 1; i <= d; ++i) csv << ",ode_x_" << i;
    csv << "\n";
    for (size_t s = 0; s < closed.size(); ++s) {
        csv << io::fmt_double(closed.times[s]);
        for (int i = 0; i < d; ++i) csv << "," << io::fmt_double(closed.points[s](i));
        for (int i = 0; i < d; ++i) csv << "," << io::fmt_double(closed.velocities[s](i));
        for (int i = 0; i < d; ++i) csv << "," << io::fmt_double(ode.points[s](i));
        csv << "\n";
    }
    csv << "# max_deviation=" << io::fmt_double(max_dev) << "\n";
    io::write_text_file(cfg.output_path, csv.str());
    out << "wrote " << cfg.output_path << " max_deviation=" << io::fmt_double(max_dev) << "\n";
    return kExitOk;
}

int run_christoffel(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    const ManifoldKind kind = manifold_kind_from_string(cfg.manifold);
    const Point p = parse_point_arg(kind, cfg.p_arg);
    const ManifoldSpec m = p.manifold();
    const Eigen::VectorXd coords = point_to_frame(p);

    const bool has_closed = m.kind != ManifoldKind::SpdCone;
    std::string mode = cfg.mode;
    if (mode == "auto") mode = has_closed ? "closed" : "numeric";
    if (mode == "closed" && !has_closed) {
        throw InputError("christoffel: the SPD cone has no closed form; use --mode numeric");
    }
    if (mode != "closed" && mode != "numeric") {
        throw InputError("christoffel: unknown mode '" + cfg.mode + "'");
    }

    json report;
    report["config"] = config_echo(cfg);
    report["dim"] = m.dim();
    report["mode"] = mode;

    auto tensor_json = [d = m.dim()](const ChristoffelTensor& gamma) {
        json k_arr = json::array();
        for (int k = 0; k < d; ++k) {
            json i_arr = json::array();
            for (int i = 0; i < d; ++i) {
                json j_arr = json::array();
                for (int j = 0; j < d; ++j) j_arr.push_back(gamma(k, i, j));
                i_arr.push_back(std::move(j_arr));
            }
            k_arr.push_back(std::move(i_arr));
        }
        return k_arr;
    };

    if (mode == "closed") {
        const ChristoffelTensor gamma = christoffel_closed(m, p);
        report["gamma"] = tensor_json(gamma);
        // Cross-check against the fundamental-theorem formula.
        const ChristoffelTensor numeric = christoffel_numeric(metric_frame_of(m), coords, cfg.fd_step);
        double diff = 0.0;
        for (int k = 0; k < m.dim(); ++k) {
            for (int i = 0; i < m.dim(); ++i) {
                for (int j = 0; j < m.dim(); ++j) {
                    diff = std::max(diff, std::abs(gamma(k, i, j) - numeric(k, i, j)));
                }
            }
        }
        report["numeric_max_diff"] = diff;
    } else {
        const ChristoffelTensor gamma = christoffel_numeric(metric_frame_of(m), coords, cfg.fd_step);
        report["gamma"] = tensor_json(gamma);
        report["symmetry_defect"] = gamma.symmetry_defect();
    }

    io::write_text_file(cfg.output_path, report.dump(2) + "\n");
    out << "wrote " << cfg.output_path << "\n";
    return kExitOk;
}

int run_gconvex(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    const ManifoldKind kind = manifold_kind_from_string(cfg.manifold);
    const ManifoldSpec m{kind, cfg.n};
    const ScalarField field = builtin_field(cfg.fn, m);

    const ConvexityReport report = violation_search(field, default_pair_sampler(m), cfg.trials,
                                                    cfg.seed, cfg.t_grid);
    json doc;
    doc["config"] = config_echo(cfg);
    doc["function"] = field.name;
    doc["report"] = io::convexity_report_to_json(report);
    io::write_text_file(cfg.output_path, doc.dump(2) + "\n");

    const bool violated = report.verdict == ConvexityReport::Verdict::violated;
    out << field.name << ": " << (violated ? "violated" : "consistent");
    if (violated) out << " (gap=" << io::fmt_double(report.witness->gap) << ")";
    out << "\n";
    return violated ? kExitViolation : kExitOk;
}

int run_bl(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    const BLDatum datum = io::read_bl_datum_file(cfg.input_path);

    json doc;
    doc["config"] = config_echo(cfg);
    json checks;
    checks["scaling_condition"] = check_scaling_condition(datum);
    if (!checks["scaling_condition"].get<bool>()) {
        doc["checks"] = checks;
        doc["failed_check"] = "scaling_condition";
        io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
        out << "infeasible: scaling condition n == sum p_j n_j fails\n";
        return kExitViolation;
    }
    checks["nondegenerate"] = check_nondegeneracy(datum);
    if (!checks["nondegenerate"].get<bool>()) {
        doc["checks"] = checks;
        doc["failed_check"] = "nondegeneracy";
        io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
        out << "infeasible: some B_j is rank deficient\n";
        return kExitViolation;
    }

    const FeasibilityReport feas = heuristic_feasibility(datum, cfg.trials, cfg.seed);
    json feas_json;
    feas_json["mode"] = "heuristic";
    feas_json["verdict"] = feas.plausible ? "plausible" : "refuted";
    feas_json["subspaces_checked"] = feas.subspaces_checked;
    if (feas.witness) feas_json["witness_basis"] = io::matrix_to_json(*feas.witness);
    checks["feasibility"] = feas_json;
    doc["checks"] = checks;
    if (!feas.plausible) {
        doc["failed_check"] = "feasibility_condition_2";
        io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
        out << "infeasible: condition 2 refuted by a concrete subspace\n";
        return kExitViolation;
    }

    const BLResult result = minimize_F(datum, SpdMatrix::Identity(datum.n()), descent_options(cfg));
    json res_json;
    res_json["X_star"] = io::matrix_to_json(result.x_star.mat());
    res_json["F_value"] = result.f_value;
    res_json["bl_constant"] = result.bl_constant;
    res_json["iterations"] = result.iterations;
    res_json["gradient_norm"] = result.gradient_norm;
    res_json["status"] = status_name(result.status);
    res_json["infeasible_suspected"] = result.infeasible_suspected;
    doc["result"] = res_json;

    bool rank_one = true;
    for (const auto& b : datum.maps()) rank_one = rank_one && b.rows() == 1;
    if (rank_one && datum.count() <= 20 && !result.infeasible_suspected) {
        const RankOneOracleResult oracle = rank_one_convex_oracle(
            datum, Eigen::VectorXd::Zero(datum.count()), descent_options(cfg));
        json oracle_json;
        oracle_json["value"] = oracle.value;
        oracle_json["bl_constant"] = oracle.bl_constant;
        oracle_json["iterations"] = oracle.iterations;
        oracle_json["agreement"] = std::abs(oracle.bl_constant - result.bl_constant);
        doc["rank_one_oracle"] = oracle_json;
    }

    if (cfg.gaussians > 0 && !result.infeasible_suspected) {
        std::mt19937_64 rng(cfg.seed);
        double best = 0.0;
        for (int s = 0; s < cfg.gaussians; ++s) {
            std::vector<SpdMatrix> gaussians;
            gaussians.reserve(static_cast<size_t>(datum.count()));
            for (int j = 0; j < datum.count(); ++j) {
                const int nj = static_cast<int>(datum.maps()[j].rows());
                gaussians.push_back(
                    sample_point(ManifoldSpec{ManifoldKind::SpdCone, nj}, rng).mat());
            }
            best = std::max(best, lieb_gaussian_value(datum, gaussians));
        }
        json gauss_json;
        gauss_json["samples"] = cfg.gaussians;
        gauss_json["max_value"] = best;
        gauss_json["bound_holds"] = best <= result.bl_constant + 1e-6;
        doc["lieb_gaussian"] = gauss_json;
    }

    io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
    if (result.infeasible_suspected) {
        out << "infeasible_suspected: F fell below the divergence floor\n";
        return kExitViolation;
    }
    out << "bl_constant=" << io::fmt_double(result.bl_constant)
        << " (F=" << io::fmt_double(result.f_value) << ", " << result.iterations
        << " iterations)\n";
    return kExitOk;
}

int run_opscale(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    json doc;
    doc["config"] = config_echo(cfg);

    std::optional<PositiveOperator> op;
    try {
        op.emplace(io::read_operator_file(cfg.input_path));
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.find("positiv") == std::string::npos) throw; // malformed file, not a certificate
        doc["failed_check"] = "strict_positivity";
        doc["detail"] = what;
        io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
        out << "degenerate: " << what << "\n";
        return kExitViolation;
    }
    doc["checks"]["strictly_positive"] = true;

    const CapacityResult cap = capacity_minimize(*op, SpdMatrix::Identity(op->order()),
                                                 descent_options(cfg));
    const ScalingResult scaling = scale(*op, cap.x_star);
    const AlternatingResult alt = alternating_scaling(*op, cfg.alt_iters);

    json res;
    res["X_star"] = io::matrix_to_json(cap.x_star.mat());
    res["log_capacity"] = cap.log_capacity;
    res["iterations"] = cap.iterations;
    res["gradient_norm"] = cap.gradient_norm;
    res["status"] = status_name(cap.status);
    res["capacity_zero_suspected"] = cap.capacity_zero_suspected;
    res["residual_left"] = scaling.residual_left;
    res["residual_right"] = scaling.residual_right;
    json scaled = json::array();
    for (const auto& a : scaling.scaled) scaled.push_back(io::matrix_to_json(a));
    res["scaled"] = scaled;
    doc["result"] = res;

    json alt_json;
    alt_json["log_capacity_estimate"] = alt.log_capacity_estimate;
    alt_json["iterations"] = alt.iterations;
    alt_json["converged"] = alt.converged;
    alt_json["final_residual"] = alt.residual_trace.empty() ? 0.0 : alt.residual_trace.back();
    alt_json["agreement"] = std::abs(alt.log_capacity_estimate - cap.log_capacity);
    doc["alternating_oracle"] = alt_json;

    std::ostringstream trace_csv;
    for (const auto& [key, value] : echo_comments(cfg)) {
        trace_csv << "# " << key << "=" << value << "\n";
    }
    trace_csv << "iter,residual\n";
    for (size_t i = 0; i < alt.residual_trace.size(); ++i) {
        trace_csv << (i + 1) << "," << io::fmt_double(alt.residual_trace[i]) << "\n";
    }
    const std::string trace_path = side_file(cfg.output_path, ".trace.csv");
    doc["residual_trace_file"] = trace_path;

    io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
    io::write_text_file(trace_path, trace_csv.str());

    if (cap.capacity_zero_suspected) {
        out << "capacity_zero_suspected: objective fell below the divergence floor\n";
        return kExitViolation;
    }
    out << "log_capacity=" << io::fmt_double(cap.log_capacity)
        << " alternating=" << io::fmt_double(alt.log_capacity_estimate)
        << " residual_right=" << io::fmt_double(scaling.residual_right) << "\n";
    return kExitOk;
}

} // namespace gct::cli
