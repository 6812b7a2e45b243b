#include "gct/gconvex.hpp"

#include <cmath>
#include <limits>

namespace gct {

namespace {

double eval_on_geodesic(const ScalarField& f, const Point& p, const Point& q, double t) {
    const double value = f.eval(geodesic_point(p, q, t));
    if (!std::isfinite(value)) {
        throw EvaluationError(f.name + ": non-finite value on geodesic at t=" + std::to_string(t),
                              t);
    }
    return value;
}

// Second divided difference scaled to match the central second difference on
// uniform grids; its sign is spacing-independent.
double second_difference(const std::vector<double>& t, const std::vector<double>& theta, size_t i) {
    const double left = (theta[i] - theta[i - 1]) / (t[i] - t[i - 1]);
    const double right = (theta[i + 1] - theta[i]) / (t[i + 1] - t[i]);
    return 2.0 * (right - left) / (t[i + 1] - t[i - 1]);
}

} // namespace

std::vector<double> default_t_grid(int count) {
    if (count < 2) throw UsageError("default_t_grid: need at least 2 points");
    std::vector<double> grid(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) grid[static_cast<size_t>(i)] = double(i) / (count - 1);
    return grid;
}

ConvexityReport midpoint_test(const ScalarField& f, const Point& p, const Point& q,
                              const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) throw UsageError("midpoint_test: grid too small");
    const double fp = eval_on_geodesic(f, p, q, 0.0);
    const double fq = eval_on_geodesic(f, p, q, 1.0);

    ConvexityReport report;
    report.t_grid_size = static_cast<int>(t_grid.size());

    std::vector<double> theta(t_grid.size());
    double worst_gap = 0.0;
    double worst_t = 0.0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        theta[i] = eval_on_geodesic(f, p, q, t);
        ++report.samples;
        const double gap = (1.0 - t) * fp + t * fq - theta[i];
        if (gap < worst_gap) {
            worst_gap = gap;
            worst_t = t;
        }
    }

    double min_dd = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 < t_grid.size(); ++i) {
        min_dd = std::min(min_dd, second_difference(t_grid, theta, i));
    }
    report.min_second_difference = std::isfinite(min_dd) ? min_dd : 0.0;

    if (worst_gap < -kTolEq) {
        report.verdict = ConvexityReport::Verdict::violated;
        report.witness = ConvexityWitness{p, q, worst_t, worst_gap};
    }
    return report;
}

FirstOrderResult first_order_test(const ScalarField& f, const Point& p, const Point& q) {
    const double fp = eval_on_geodesic(f, p, q, 0.0);
    const double fq = eval_on_geodesic(f, p, q, 1.0);
    const double d = kFirstOrderStep;
    const double slope =
        (eval_on_geodesic(f, p, q, d) - eval_on_geodesic(f, p, q, -d)) / (2.0 * d);
    const double lhs = fp + slope;
    return FirstOrderResult{lhs, fq, lhs <= fq + kTolIneq};
}

double second_order_test(const ScalarField& f, const Point& p, const Point& q,
                         const std::vector<double>& t_grid) {
    if (t_grid.size() < 3) throw UsageError("second_order_test: grid too small");
    std::vector<double> theta(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) theta[i] = eval_on_geodesic(f, p, q, t_grid[i]);
    double min_dd = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i + 1 < t_grid.size(); ++i) {
        min_dd = std::min(min_dd, second_difference(t_grid, theta, i));
    }
    return min_dd;
}

Point sample_point(const ManifoldSpec& m, std::mt19937_64& rng) {
    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            std::uniform_real_distribution<double> box(-10.0, 10.0);
            Eigen::VectorXd x(m.n);
            for (int i = 0; i < m.n; ++i) x(i) = box(rng);
            return Point(m, x);
        }
        case ManifoldKind::PositiveOrthant: {
            // Log-uniform in [0.1, 10].
            std::uniform_real_distribution<double> logbox(std::log(0.1), std::log(10.0));
            Eigen::VectorXd x(m.n);
            for (int i = 0; i < m.n; ++i) x(i) = std::exp(logbox(rng));
            return Point(m, x);
        }
        case ManifoldKind::SpdCone: {
            // sym_exp of a random symmetric matrix with spectral radius <= 1.5.
            std::uniform_real_distribution<double> entry(-1.0, 1.0);
            std::uniform_real_distribution<double> radius(0.0, 1.5);
            Eigen::MatrixXd s(m.n, m.n);
            for (int i = 0; i < m.n; ++i) {
                for (int j = i; j < m.n; ++j) {
                    s(i, j) = entry(rng);
                    s(j, i) = s(i, j);
                }
            }
            const double target = radius(rng);
            const SymEig eig = sym_eig(SymMatrix(s));
            const double rho = std::max(std::abs(eig.values(0)), std::abs(eig.values(m.n - 1)));
            if (rho > 0.0) s *= target / rho;
            return Point(m, sym_exp(SymMatrix(s)));
        }
    }
    throw UsageError("sample_point: unknown manifold kind");
}

PairSampler default_pair_sampler(const ManifoldSpec& m) {
    return PairSampler{[m](std::mt19937_64& rng) {
        Point p = sample_point(m, rng);
        Point q = sample_point(m, rng);
        return std::make_pair(p, q);
    }};
}

ConvexityReport violation_search(const ScalarField& f, const PairSampler& sampler, int trials,
                                 std::uint64_t seed, int t_grid_size) {
    if (trials < 1) throw UsageError("violation_search: need at least one trial");
    std::mt19937_64 rng(seed);
    const std::vector<double> grid = default_t_grid(t_grid_size);

    ConvexityReport report;
    report.seed = seed;
    double min_dd = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        const auto [p, q] = sampler.draw(rng);
        ConvexityReport local = midpoint_test(f, p, q, grid);
        report.samples += local.samples;
        min_dd = std::min(min_dd, local.min_second_difference);
        if (local.verdict == ConvexityReport::Verdict::violated) {
            // Certify by exact re-evaluation at the witness.
            const ConvexityWitness& w = *local.witness;
            const double fp = f.eval(w.p);
            const double fq = f.eval(w.q);
            const double ft = f.eval(geodesic_point(w.p, w.q, w.t));
            const double gap = (1.0 - w.t) * fp + w.t * fq - ft;
            if (gap < -kTolEq) {
                report.verdict = ConvexityReport::Verdict::violated;
                report.witness = ConvexityWitness{w.p, w.q, w.t, gap};
                report.min_second_difference = min_dd;
                return report;
            }
        }
    }
    report.min_second_difference = std::isfinite(min_dd) ? min_dd : 0.0;
    return report;
}

namespace {

// Fixed strictly positive operator for the logdet-T example: a seeded Kraus
// family with a deterministic identity component to guarantee positivity.
std::vector<Eigen::MatrixXd> builtin_kraus_family(int n) {
    std::mt19937_64 rng(kDefaultSeed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::MatrixXd> family;
    family.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int k = 0; k < 2; ++k) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = gauss(rng) / std::sqrt(2.0 * n);
        }
        family.push_back(a);
    }
    return family;
}

} // namespace

ScalarField builtin_field(const std::string& name, const ManifoldSpec& m) {
    if (m.kind == ManifoldKind::Euclidean) {
        if (name == "sin-exp") {
            return {m, [](const Point& p) { return std::sin(p.vec()(0)) * std::exp(p.vec()(0) / 12.0); },
                    name};
        }
    }
    if (m.kind == ManifoldKind::PositiveOrthant) {
        if (name == "logbarrier") {
            return {m, [](const Point& p) { return p.vec().array().log().sum(); }, name};
        }
        if (name == "neg-logbarrier") {
            return {m, [](const Point& p) { return -p.vec().array().log().sum(); }, name};
        }
        if (name == "monomial") {
            return {m, [](const Point& p) { return p.vec().array().prod(); }, name};
        }
        if (name == "posynomial") {
            return {m, [](const Point& p) {
                        return 1.0 + p.vec().array().sum() + p.vec().array().square().prod();
                    },
                    name};
        }
        if (name == "logpoly") {
            return {m, [](const Point& p) {
                        return std::log(1.0 + p.vec().array().sum() +
                                        p.vec().array().square().prod());
                    },
                    name};
        }
        if (name == "logx1-minus-x2" && m.n >= 2) {
            return {m, [](const Point& p) { return std::log(p.vec()(0)) - p.vec()(1); }, name};
        }
    }
    if (m.kind == ManifoldKind::SpdCone) {
        if (name == "logdet") {
            return {m, [](const Point& p) { return spd_logdet(p.mat().mat()); }, name};
        }
        if (name == "neg-logdet") {
            return {m, [](const Point& p) { return -spd_logdet(p.mat().mat()); }, name};
        }
        if (name == "logdet-T") {
            auto family = builtin_kraus_family(m.n);
            return {m, [family](const Point& p) {
                        Eigen::MatrixXd acc =
                            Eigen::MatrixXd::Zero(p.mat().order(), p.mat().order());
                        for (const auto& a : family) acc += a * p.mat().mat() * a.transpose();
                        return spd_logdet(acc);
                    },
                    name};
        }
    }
    throw InputError("unknown built-in function '" + name + "' on manifold " +
                     to_string(m.kind));
}

std::vector<std::string> builtin_field_names(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::Euclidean: return {"sin-exp"};
        case ManifoldKind::PositiveOrthant:
            return {"logbarrier", "neg-logbarrier", "monomial", "posynomial", "logpoly",
                    "logx1-minus-x2"};
        case ManifoldKind::SpdCone: return {"logdet", "neg-logdet", "logdet-T"};
    }
    return {};
}

std::vector<ScalarField> g_convex_suite(const ManifoldSpec& m) {
    std::vector<ScalarField> suite;
    switch (m.kind) {
        case ManifoldKind::PositiveOrthant:
            for (const char* name :
                 {"logbarrier", "neg-logbarrier", "monomial", "posynomial", "logpoly"}) {
                suite.push_back(builtin_field(name, m));
            }
            break;
        case ManifoldKind::SpdCone:
            for (const char* name : {"logdet", "neg-logdet", "logdet-T"}) {
                suite.push_back(builtin_field(name, m));
            }
            break;
        case ManifoldKind::Euclidean:
            break;
    }
    return suite;
}

} // namespace gct
