#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "gct/cli.hpp"

namespace gct::cli {

namespace {

using io::json;

struct Check {
    std::string name;
    bool pass;
    double metric; // the worst observed error (or the deciding quantity)
};

struct Battery {
    std::vector<Check> checks;
    std::mt19937_64 rng;

    explicit Battery(std::uint64_t seed) : rng(seed) {}

    void add(const std::string& name, double worst, double tol) {
        checks.push_back({name, worst <= tol, worst});
    }
    void add_flag(const std::string& name, bool pass, double metric = 0.0) {
        checks.push_back({name, pass, metric});
    }
};

SpdMatrix random_spd(int n, std::mt19937_64& rng) {
    return sample_point(ManifoldSpec{ManifoldKind::SpdCone, n}, rng).mat();
}

SymMatrix random_sym(int n, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            s(i, j) = entry(rng);
            s(j, i) = s(i, j);
        }
    }
    const SymEig eig = sym_eig(SymMatrix(s));
    const double rho = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
    if (rho > 0.0) s *= radius / rho;
    return SymMatrix(s);
}

PositiveOperator random_operator(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::MatrixXd> kraus;
    for (int k = 0; k < m; ++k) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = gauss(rng) / std::sqrt(double(m * n));
        }
        kraus.push_back(a);
    }
    return PositiveOperator(std::move(kraus));
}

BLDatum random_rank_one_datum(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::MatrixXd> maps;
    for (int j = 0; j < m; ++j) {
        Eigen::MatrixXd b(1, n);
        for (int c = 0; c < n; ++c) b(0, c) = gauss(rng);
        maps.push_back(b);
    }
    // Weights strictly inside the hypersimplex {0 < p_j < 1, sum p_j = n},
    // which keeps the datum feasible for generic rows; rejection-sample a
    // normalized exponential vector until every entry clears the cap.
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd p(m);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            p(j) = expo(rng) + 1e-3;
            total += p(j);
        }
        p *= double(n) / total;
        if ((p.array() < 0.95).all()) return BLDatum(n, std::move(maps), p);
    }
    throw Error("random_rank_one_datum: weight sampling failed");
}

void check_matfun(Battery& b) {
    double worst_power = 0.0, worst_exp = 0.0;
    std::uniform_real_distribution<double> expo(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const SpdMatrix p = random_spd(3, b.rng);
        const double s = expo(b.rng), t = expo(b.rng);
        const Eigen::MatrixXd lhs = spd_power(p, s).mat() * spd_power(p, t).mat();
        const Eigen::MatrixXd rhs = spd_power(p, s + t).mat();
        worst_power = std::max(worst_power, (lhs - rhs).norm() / rhs.norm());

        const SymMatrix x = random_sym(3, 2.0, b.rng);
        const Eigen::MatrixXd prod =
            sym_exp(x).mat() * sym_exp(SymMatrix(-x.mat())).mat();
        worst_exp = std::max(worst_exp, (prod - Eigen::MatrixXd::Identity(3, 3)).norm());
    }
    b.add("matfun.power-law", worst_power, 1e-9);
    b.add("matfun.exp-inverse", worst_exp, 1e-9);
}

void check_metric_axioms(Battery& b) {
    double worst = 0.0;
    bool positive = true;
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (ManifoldKind kind :
         {ManifoldKind::Euclidean, ManifoldKind::PositiveOrthant, ManifoldKind::SpdCone}) {
        const ManifoldSpec m{kind, 3};
        for (int trial = 0; trial < 20; ++trial) {
            const Point p = sample_point(m, b.rng);
            auto rand_tangent = [&] {
                Eigen::VectorXd v(m.dim());
                for (int i = 0; i < m.dim(); ++i) v(i) = coeff(b.rng);
                return tangent_from_frame(p, v);
            };
            const Tangent u = rand_tangent(), v = rand_tangent(), w = rand_tangent();
            const double c = coeff(b.rng);
            worst = std::max(worst, std::abs(metric_inner(p, u, v) - metric_inner(p, v, u)));
            const Tangent cu_v = tangent_from_frame(
                p, (c * tangent_to_frame(u) + tangent_to_frame(v)).eval());
            worst = std::max(worst, std::abs(metric_inner(p, cu_v, w) -
                                             (c * metric_inner(p, u, w) + metric_inner(p, v, w))));
            if (tangent_to_frame(u).norm() > 0 && !(metric_inner(p, u, u) > 0.0)) {
                positive = false;
            }
        }
    }
    b.add("manifold.metric-axioms", worst, 1e-10);
    b.add_flag("manifold.metric-positivity", positive);
}

void check_geodesics(Battery& b) {
    double worst_repar = 0.0, worst_logdet = 0.0;
    for (ManifoldKind kind :
         {ManifoldKind::Euclidean, ManifoldKind::PositiveOrthant, ManifoldKind::SpdCone}) {
        const ManifoldSpec m{kind, 3};
        for (int trial = 0; trial < 10; ++trial) {
            const Point p = sample_point(m, b.rng);
            const Point q = sample_point(m, b.rng);
            const Tangent v = log_map(p, q);
            for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const Eigen::VectorXd a = point_to_frame(geodesic_point(p, q, t));
                const Eigen::VectorXd c = point_to_frame(exp_map(p, v, t));
                worst_repar = std::max(worst_repar, (a - c).norm());
            }
        }
    }
    const ManifoldSpec spd{ManifoldKind::SpdCone, 4};
    for (int trial = 0; trial < 10; ++trial) {
        const Point p = sample_point(spd, b.rng);
        const Point q = sample_point(spd, b.rng);
        const double ldp = spd_logdet(p.mat().mat());
        const double ldq = spd_logdet(q.mat().mat());
        for (double t : {0.1, 0.35, 0.5, 0.8}) {
            const double ld = spd_logdet(geodesic_point(p, q, t).mat().mat());
            worst_logdet = std::max(worst_logdet, std::abs(ld - (1 - t) * ldp - t * ldq));
        }
    }
    b.add("manifold.exp-log-reparametrization", worst_repar, 1e-9);
    b.add("manifold.logdet-interpolation", worst_logdet, 1e-9);
}

void check_connection(Battery& b) {
    // Closed form vs the fundamental-theorem formula.
    double worst_gamma = 0.0;
    std::uniform_real_distribution<double> box(0.5, 2.0);
    for (ManifoldKind kind : {ManifoldKind::Euclidean, ManifoldKind::PositiveOrthant}) {
        const ManifoldSpec m{kind, 3};
        const MetricFrame frame = metric_frame_of(m);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd coords(3);
            for (int i = 0; i < 3; ++i) coords(i) = box(b.rng);
            const ChristoffelTensor numeric = christoffel_numeric(frame, coords, 1e-4);
            const ChristoffelTensor closed = christoffel_closed(m, point_from_frame(m, coords));
            for (int k = 0; k < 3; ++k) {
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        worst_gamma =
                            std::max(worst_gamma, std::abs(numeric(k, i, j) - closed(k, i, j)));
                    }
                }
            }
        }
    }
    b.add("connection.christoffel-closed-vs-numeric", worst_gamma, 1e-5);

    // Metric compatibility: d_k g_ij == sum_l (G^l_ki g_lj + G^l_kj g_il).
    double worst_compat = 0.0;
    for (ManifoldKind kind :
         {ManifoldKind::Euclidean, ManifoldKind::PositiveOrthant, ManifoldKind::SpdCone}) {
        const ManifoldSpec m{kind, kind == ManifoldKind::SpdCone ? 2 : 3};
        const MetricFrame frame = metric_frame_of(m);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::VectorXd coords = point_to_frame(sample_point(m, b.rng));
            const double h = default_fd_step(coords);
            const ChristoffelTensor gamma = christoffel_numeric(frame, coords, h);
            const Eigen::MatrixXd g0 = frame.eval(coords);
            for (int k = 0; k < m.dim(); ++k) {
                Eigen::VectorXd fwd = coords, bwd = coords;
                fwd(k) += h;
                bwd(k) -= h;
                const Eigen::MatrixXd dk = (frame.eval(fwd) - frame.eval(bwd)) / (2 * h);
                for (int i = 0; i < m.dim(); ++i) {
                    for (int j = 0; j < m.dim(); ++j) {
                        double rhs = 0.0;
                        for (int l = 0; l < m.dim(); ++l) {
                            rhs += gamma(l, k, i) * g0(l, j) + gamma(l, k, j) * g0(i, l);
                        }
                        worst_compat = std::max(worst_compat, std::abs(dk(i, j) - rhs));
                    }
                }
            }
        }
    }
    b.add("connection.metric-compatibility", worst_compat, 1e-4);

    // ODE endpoints against the closed forms; endpoints kept within a
    // bounded ratio so the RK4 truncation error stays under the tolerance.
    double worst_orthant = 0.0, worst_spd = 0.0;
    {
        const ManifoldSpec m{ManifoldKind::PositiveOrthant, 2};
        std::uniform_real_distribution<double> logbox(std::log(0.5), std::log(2.0));
        auto moderate_point = [&] {
            Eigen::VectorXd x(m.n);
            for (int i = 0; i < m.n; ++i) x(i) = std::exp(logbox(b.rng));
            return Point(m, x);
        };
        for (int trial = 0; trial < 5; ++trial) {
            const Point p = moderate_point();
            const Point q = moderate_point();
            const CurveTrace ode =
                geodesic_ode_solve(christoffel_source_of(m), point_to_frame(p),
                                   tangent_to_frame(log_map(p, q)), 1.0, 100,
                                   validity_guard_of(m));
            worst_orthant = std::max(
                worst_orthant, (ode.points.back() - point_to_frame(q)).norm());
        }
    }
    {
        const ManifoldSpec m{ManifoldKind::SpdCone, 2};
        for (int trial = 0; trial < 3; ++trial) {
            const Point p = sample_point(m, b.rng);
            const Point q = sample_point(m, b.rng);
            const CurveTrace ode =
                geodesic_ode_solve(christoffel_source_of(m), point_to_frame(p),
                                   tangent_to_frame(log_map(p, q)), 1.0, 100,
                                   validity_guard_of(m));
            worst_spd = std::max(worst_spd, (ode.points.back() - point_to_frame(q)).norm());
        }
    }
    b.add("connection.ode-endpoint-orthant", worst_orthant, 1e-6);
    b.add("connection.ode-endpoint-spd", worst_spd, 1e-5);

    // First variation of the energy vanishes on geodesics.
    bool minimum_at_zero = true;
    double worst_slope = 0.0;
    const std::vector<double> u_grid{-0.1, -0.05, -0.01, 0.0, 0.01, 0.05, 0.1};
    const ManifoldSpec m{ManifoldKind::PositiveOrthant, 2};
    std::uniform_real_distribution<double> logbox2(std::log(0.5), std::log(2.0));
    auto separated_pair = [&] {
        while (true) {
            Eigen::VectorXd a(2), c(2);
            for (int i = 0; i < 2; ++i) {
                a(i) = std::exp(logbox2(b.rng));
                c(i) = std::exp(logbox2(b.rng));
            }
            const Point pp(m, a), qq(m, c);
            if (distance(pp, qq) >= 0.5) return std::make_pair(pp, qq);
        }
    };
    for (int trial = 0; trial < 3; ++trial) {
        const auto [p, q] = separated_pair();
        const CurveTrace trace = sample_closed_form_geodesic(p, q, 1201);
        for (int bump = 1; bump <= 2; ++bump) {
            Eigen::VectorXd dir(2);
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            dir << unit(b.rng), unit(b.rng);
            dir *= 0.05;
            const auto samples =
                variation_energy_test(m, trace, sine_bump_field(0.0, 1.0, bump, dir), u_grid);
            double s0 = 0.0, splus = 0.0, sminus = 0.0;
            for (const auto& s : samples) {
                if (s.u == 0.0) s0 = s.energy;
                if (s.u == 0.01) splus = s.energy;
                if (s.u == -0.01) sminus = s.energy;
            }
            for (const auto& s : samples) {
                if (s.valid && s.u != 0.0 && s.energy < s0) minimum_at_zero = false;
            }
            worst_slope = std::max(worst_slope, std::abs((splus - sminus) / 0.02) / s0);
        }
    }
    b.add_flag("connection.variation-minimum-at-geodesic", minimum_at_zero);
    b.add("connection.variation-first-derivative", worst_slope, 1e-5);
}

void check_gconvex(Battery& b) {
    bool suite_clean = true;
    for (const ManifoldSpec m :
         {ManifoldSpec{ManifoldKind::PositiveOrthant, 2}, ManifoldSpec{ManifoldKind::SpdCone, 2}}) {
        for (const ScalarField& f : g_convex_suite(m)) {
            const ConvexityReport report =
                violation_search(f, default_pair_sampler(m), 100, b.rng());
            if (report.verdict != ConvexityReport::Verdict::consistent) suite_clean = false;
        }
    }
    b.add_flag("gconvex.builtin-suite-consistent", suite_clean);

    const ManifoldSpec e1{ManifoldKind::Euclidean, 1};
    const ConvexityReport sin_report = violation_search(
        builtin_field("sin-exp", e1), default_pair_sampler(e1), 100, b.rng());
    b.add_flag("gconvex.sin-exp-witness",
               sin_report.verdict == ConvexityReport::Verdict::violated,
               sin_report.witness ? sin_report.witness->gap : 0.0);

    // Loewner-order convexity of strictly positive maps along SPD geodesics.
    double worst_loewner = 0.0;
    const ManifoldSpec spd{ManifoldKind::SpdCone, 3};
    for (int trial = 0; trial < 10; ++trial) {
        const PositiveOperator t = random_operator(3, 3, b.rng);
        const Point p = sample_point(spd, b.rng);
        const Point q = sample_point(spd, b.rng);
        const SymMatrix tp = apply(t, p.mat().sym());
        const SymMatrix tq = apply(t, q.mat().sym());
        for (double s : {0.2, 0.5, 0.8}) {
            const SymMatrix mid = apply(t, geodesic_point(p, q, s).mat().sym());
            const SymMatrix gap(
                ((1 - s) * tp.mat() + s * tq.mat() - mid.mat()).eval());
            const SymEig eig = sym_eig(gap);
            worst_loewner = std::min(worst_loewner, eig.values(eig.values.size() - 1));
        }
    }
    b.add("gconvex.loewner-convexity", -worst_loewner, 1e-8);
}

void check_bl(Battery& b) {
    // Known values: identity rows and scalar Hoelder both give BL = 1.
    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 0, 1).finished()};
    const BLDatum identity_rows(2, rows, (Eigen::VectorXd(2) << 1, 1).finished());
    const double bl_rows = bl_constant(identity_rows);

    std::vector<Eigen::MatrixXd> ones{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                      Eigen::MatrixXd::Ones(1, 1)};
    const BLDatum hoelder(1, ones, (Eigen::VectorXd(3) << 0.2, 0.3, 0.5).finished());
    const double bl_hoelder = bl_constant(hoelder);
    b.add("bl.known-constants",
          std::max(std::abs(bl_rows - 1.0), std::abs(bl_hoelder - 1.0)), 1e-6);

    // Rank-one oracle agreement on random data.
    double worst_agree = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const BLDatum d = random_rank_one_datum(2, 4, b.rng);
        const BLResult descent = minimize_F(d, SpdMatrix::Identity(2));
        const RankOneOracleResult oracle =
            rank_one_convex_oracle(d, Eigen::VectorXd::Zero(4));
        worst_agree = std::max(worst_agree,
                               std::abs(descent.bl_constant - oracle.bl_constant));
    }
    b.add("bl.rank-one-oracle-agreement", worst_agree, 1e-4);

    // Gaussian values never beat the constant.
    double worst_excess = 0.0;
    {
        const BLResult res = minimize_F(identity_rows, SpdMatrix::Identity(2));
        for (int s = 0; s < 20; ++s) {
            std::vector<SpdMatrix> a;
            for (int j = 0; j < identity_rows.count(); ++j) a.push_back(random_spd(1, b.rng));
            worst_excess = std::max(
                worst_excess, lieb_gaussian_value(identity_rows, a) - res.bl_constant);
        }
    }
    b.add("bl.gaussian-lower-bound", worst_excess, 1e-6);

    // Analytic gradient against central differences.
    double worst_grad = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const BLDatum d = random_rank_one_datum(3, 5, b.rng);
        const SpdMatrix x = random_spd(3, b.rng);
        const SymMatrix g = F_euclid_grad(d, x);
        const SymMatrix dir = random_sym(3, 1.0, b.rng);
        const double h = 1e-5;
        const double fd = (F_eval(d, SpdMatrix(x.mat() + h * dir.mat())) -
                           F_eval(d, SpdMatrix(x.mat() - h * dir.mat()))) /
                          (2 * h);
        const double analytic = (g.mat().array() * dir.mat().array()).sum();
        worst_grad = std::max(worst_grad,
                              std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
    }
    b.add("bl.gradient-check", worst_grad, 1e-6);

    // F is geodesically convex along SPD geodesics.
    double worst_second = 0.0;
    const ManifoldSpec spd{ManifoldKind::SpdCone, 2};
    for (int trial = 0; trial < 5; ++trial) {
        const BLDatum d = random_rank_one_datum(2, 4, b.rng);
        const ScalarField field{spd, [&d](const Point& x) { return F_eval(d, x.mat()); },
                                "F_{B,p}"};
        const Point p = sample_point(spd, b.rng);
        const Point q = sample_point(spd, b.rng);
        worst_second =
            std::min(worst_second, second_order_test(field, p, q, default_t_grid()));
    }
    b.add("bl.objective-geodesic-convexity", -worst_second, 1e-6);
}

void check_opscale(Battery& b) {
    // Adjoint duality <T(X),Y> == <X,T*(Y)>.
    double worst_dual = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const PositiveOperator t = random_operator(3, 3, b.rng);
        const SymMatrix x = random_sym(3, 1.0, b.rng);
        const SymMatrix y = random_sym(3, 1.0, b.rng);
        const double lhs = (apply(t, x).mat().array() * y.mat().array()).sum();
        const double rhs = (x.mat().array() * apply_adjoint(t, y).mat().array()).sum();
        worst_dual = std::max(worst_dual, std::abs(lhs - rhs));
    }
    b.add("opscale.adjoint-duality", worst_dual, 1e-12);

    // Identity operator: objective is identically zero.
    const PositiveOperator id_op({Eigen::MatrixXd::Identity(2, 2)});
    const CapacityResult id_cap = capacity_minimize(id_op, random_spd(2, b.rng));
    b.add("opscale.identity-capacity", std::abs(id_cap.log_capacity), 1e-12);

    // Descent vs the alternating oracle, and double stochasticity at the optimum.
    double worst_cross = 0.0, worst_residual = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const PositiveOperator t = random_operator(3, 3, b.rng);
        const CapacityResult cap = capacity_minimize(t, SpdMatrix::Identity(3));
        const AlternatingResult alt = alternating_scaling(t);
        worst_cross =
            std::max(worst_cross, std::abs(cap.log_capacity - alt.log_capacity_estimate));
        worst_residual = std::max(worst_residual, scale(t, cap.x_star).residual_right);
    }
    b.add("opscale.descent-vs-alternating", worst_cross, 1e-5);
    b.add("opscale.scaled-residual-right", worst_residual, 1e-6);

    // Kadison inequality and the Schur-complement certificate.
    double worst_kadison = 0.0, worst_schur = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const PositiveOperator t = random_operator(3, 3, b.rng);
        const SpdMatrix p = random_spd(3, b.rng);
        const SymMatrix x = random_sym(3, 1.5, b.rng);
        worst_kadison = std::min(worst_kadison, kadison_residual(t, p, x));

        SymLinearMap raw = [&t](const SymMatrix& y) { return apply(t, y); };
        const SymLinearMap normalized = kadison_normalized_map(raw, 3, p);
        const Eigen::MatrixXd tx = normalized(x).mat();
        const Eigen::MatrixXd tx2 = normalized(SymMatrix(x.mat() * x.mat())).mat();
        Eigen::MatrixXd block(6, 6);
        block << tx2, tx, tx, Eigen::MatrixXd::Identity(3, 3);
        const SymEig eig = sym_eig(SymMatrix(block));
        worst_schur = std::min(worst_schur, eig.values(eig.values.size() - 1));
    }
    b.add("opscale.kadison-inequality", -worst_kadison, 1e-10);
    b.add("opscale.schur-certificate", -worst_schur, 1e-10);
}

} // namespace

int run_selftest(const RunConfig& cfg, std::ostream& out) {
    validate(cfg);
    Battery battery(cfg.seed);

    check_matfun(battery);
    check_metric_axioms(battery);
    check_geodesics(battery);
    check_connection(battery);
    check_gconvex(battery);
    check_bl(battery);
    check_opscale(battery);

    bool all_pass = true;
    json rows = json::array();
    for (const Check& c : battery.checks) {
        all_pass = all_pass && c.pass;
        out << (c.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(44) << c.name
            << " metric=" << io::fmt_double(c.metric) << "\n";
        json row;
        row["name"] = c.name;
        row["pass"] = c.pass;
        row["metric"] = c.metric;
        rows.push_back(std::move(row));
    }
    out << (all_pass ? "selftest: all checks passed" : "selftest: FAILURES present") << "\n";

    if (!cfg.output_path.empty()) {
        json doc;
        doc["config"] = config_echo(cfg);
        doc["checks"] = rows;
        doc["all_pass"] = all_pass;
        io::write_text_file(cfg.output_path, doc.dump(2) + "\n");
    }
    return all_pass ? kExitOk : kExitError;
}

} // namespace gct::cli
