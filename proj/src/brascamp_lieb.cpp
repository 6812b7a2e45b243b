#include "gct/brascamp_lieb.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gct {

namespace {

constexpr double kConditionTol = 1e-12;
constexpr double kRankRelTol = 1e-10;
constexpr int kMaxEnumeratedSubsetDim = 14;

int numeric_rank(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > kRankRelTol * sv(0)) ++rank;
    }
    return rank;
}

} // namespace

BLDatum::BLDatum(int n, std::vector<Eigen::MatrixXd> maps, Eigen::VectorXd weights)
    : n_(n), maps_(std::move(maps)), weights_(std::move(weights)) {
    if (n_ < 1) throw InputError("BLDatum: ambient dimension must be positive");
    if (maps_.empty() || weights_.size() != static_cast<Eigen::Index>(maps_.size())) {
        throw InputError("BLDatum: need one weight per map");
    }
    for (const auto& b : maps_) {
        if (b.cols() != n_ || b.rows() < 1) {
            throw InputError("BLDatum: every map must be n_j x n with n_j >= 1");
        }
        if (!b.allFinite()) throw InputError("BLDatum: non-finite map entries");
    }
    if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
        throw InputError("BLDatum: weights must be non-negative");
    }
}

bool check_scaling_condition(const BLDatum& d) {
    double acc = 0.0;
    for (int j = 0; j < d.count(); ++j) acc += d.weights()(j) * d.maps()[j].rows();
    return std::abs(double(d.n()) - acc) <= kConditionTol;
}

bool check_nondegeneracy(const BLDatum& d) {
    if (!check_scaling_condition(d)) return false;
    for (const auto& b : d.maps()) {
        if (numeric_rank(b) != b.rows()) return false;
    }
    return true;
}

FeasibilityReport heuristic_feasibility(const BLDatum& d, int trials, std::uint64_t seed) {
    if (!check_scaling_condition(d)) {
        throw UsageError("heuristic_feasibility: scaling condition must hold first");
    }
    const int n = d.n();

    auto violates = [&](const Eigen::MatrixXd& basis) {
        const int dim_v = static_cast<int>(basis.cols());
        double rhs = 0.0;
        for (int j = 0; j < d.count(); ++j) {
            rhs += d.weights()(j) * numeric_rank(d.maps()[j] * basis);
        }
        return double(dim_v) > rhs + 1e-9;
    };

    FeasibilityReport report{true, std::nullopt, 0};

    // Coordinate subspaces first; they witness most textbook failures.
    if (n <= kMaxEnumeratedSubsetDim) {
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i) {
                if (mask & (1u << i)) idx.push_back(i);
            }
            Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, static_cast<int>(idx.size()));
            for (size_t c = 0; c < idx.size(); ++c) basis(idx[c], static_cast<int>(c)) = 1.0;
            ++report.subspaces_checked;
            if (violates(basis)) {
                return {false, basis, report.subspaces_checked};
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        for (int k = 1; k < n; ++k) {
            Eigen::MatrixXd raw(n, k);
            for (int i = 0; i < n; ++i) {
                for (int c = 0; c < k; ++c) raw(i, c) = gauss(rng);
            }
            const Eigen::MatrixXd basis =
                Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
                Eigen::MatrixXd::Identity(n, k);
            ++report.subspaces_checked;
            if (violates(basis)) {
                return {false, basis, report.subspaces_checked};
            }
        }
    }
    return report;
}

double F_eval(const BLDatum& d, const SpdMatrix& x) {
    if (x.order() != d.n()) throw UsageError("F_eval: matrix order does not match datum");
    double acc = -spd_logdet(x.mat());
    for (int j = 0; j < d.count(); ++j) {
        const double pj = d.weights()(j);
        if (pj == 0.0) continue; // the j-th term drops out
        const Eigen::MatrixXd& b = d.maps()[j];
        acc += pj * spd_logdet(b * x.mat() * b.transpose());
    }
    return acc;
}

SymMatrix F_euclid_grad(const BLDatum& d, const SpdMatrix& x) {
    if (x.order() != d.n()) throw UsageError("F_euclid_grad: matrix order does not match datum");
    Eigen::MatrixXd grad = -spd_power(x, -1.0).mat();
    for (int j = 0; j < d.count(); ++j) {
        const double pj = d.weights()(j);
        if (pj == 0.0) continue;
        const Eigen::MatrixXd& b = d.maps()[j];
        const Eigen::MatrixXd inner = b * x.mat() * b.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(inner);
        if (llt.info() != Eigen::Success) {
            throw ConditioningError("F_euclid_grad: B_j X B_j^T is not positive definite");
        }
        grad += pj * b.transpose() * llt.solve(b);
    }
    return SymMatrix(grad);
}

BLResult minimize_F(const BLDatum& d, const SpdMatrix& x0, const DescentOptions& opts) {
    if (!check_nondegeneracy(d)) {
        throw UsageError("minimize_F: datum is degenerate (rank or scaling condition fails)");
    }
    const DescentResult res = geodesic_descent(
        [&d](const SpdMatrix& x) { return F_eval(d, x); },
        [&d](const SpdMatrix& x) { return F_euclid_grad(d, x); }, x0, opts);
    return BLResult{res.x,
                    res.value,
                    std::exp(-0.5 * res.value),
                    res.iterations,
                    res.gradient_norm,
                    res.status,
                    res.status == DescentStatus::DivergenceSuspected};
}

double bl_constant(const BLDatum& d, const DescentOptions& opts) {
    return minimize_F(d, SpdMatrix::Identity(d.n()), opts).bl_constant;
}

double lieb_gaussian_value(const BLDatum& d, const std::vector<SpdMatrix>& a) {
    if (static_cast<int>(a.size()) != d.count()) {
        throw UsageError("lieb_gaussian_value: need one Gaussian per map");
    }
    double log_num = 0.0;
    Eigen::MatrixXd denom = Eigen::MatrixXd::Zero(d.n(), d.n());
    for (int j = 0; j < d.count(); ++j) {
        const double pj = d.weights()(j);
        if (a[j].order() != d.maps()[j].rows()) {
            throw UsageError("lieb_gaussian_value: Gaussian size does not match map");
        }
        if (pj == 0.0) continue;
        log_num += pj * spd_logdet(a[j].mat());
        denom += pj * d.maps()[j].transpose() * a[j].mat() * d.maps()[j];
    }
    return std::exp(0.5 * (log_num - spd_logdet(denom)));
}

namespace {

struct RankOneModel {
    std::vector<double> log_coeff;          // log c_alpha for c_alpha > 0
    std::vector<Eigen::VectorXd> indicator; // alpha as a 0/1 vector in R^m
    double weight_entropy;                  // sum_j p_j log p_j
};

RankOneModel build_rank_one_model(const BLDatum& d) {
    const int m = d.count();
    const int n = d.n();
    for (const auto& b : d.maps()) {
        if (b.rows() != 1) throw UsageError("rank_one_convex_oracle: all maps must be rows");
    }
    if (m > 20) {
        throw UsageError("rank_one_convex_oracle: too many maps for subset enumeration");
    }
    if (n > m) throw UsageError("rank_one_convex_oracle: fewer maps than dimensions");

    RankOneModel model;
    model.weight_entropy = 0.0;
    for (int j = 0; j < m; ++j) {
        const double pj = d.weights()(j);
        if (pj > 0.0) model.weight_entropy += pj * std::log(pj);
    }

    // Cauchy-Binet: det(sum_j e^{y_j} b_j b_j^T) = sum_{|alpha|=n} c_alpha e^{<alpha,y>}
    // with c_alpha = det(B_alpha)^2.
    std::vector<int> subset(n);
    for (int i = 0; i < n; ++i) subset[i] = i;
    while (true) {
        Eigen::MatrixXd stacked(n, n);
        for (int r = 0; r < n; ++r) stacked.row(r) = d.maps()[subset[r]].row(0);
        const double det = stacked.determinant();
        if (det * det > 0.0) {
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
            for (int r = 0; r < n; ++r) alpha(subset[r]) = 1.0;
            model.log_coeff.push_back(2.0 * std::log(std::abs(det)));
            model.indicator.push_back(alpha);
        }
        int i = n - 1;
        while (i >= 0 && subset[i] == m - n + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int r = i + 1; r < n; ++r) subset[r] = subset[r - 1] + 1;
    }
    if (model.log_coeff.empty()) {
        throw ConditioningError("rank_one_convex_oracle: every n-subset of maps is singular");
    }
    return model;
}

// f and grad f via a max-shifted log-sum-exp.
double rank_one_value_grad(const RankOneModel& model, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& y, Eigen::VectorXd* grad) {
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> exponent(model.log_coeff.size());
    for (size_t a = 0; a < model.log_coeff.size(); ++a) {
        exponent[a] = model.log_coeff[a] + model.indicator[a].dot(y);
        shift = std::max(shift, exponent[a]);
    }
    double total = 0.0;
    Eigen::VectorXd weighted = Eigen::VectorXd::Zero(y.size());
    for (size_t a = 0; a < model.log_coeff.size(); ++a) {
        const double w = std::exp(exponent[a] - shift);
        total += w;
        weighted += w * model.indicator[a];
    }
    const double lse = shift + std::log(total);
    if (grad) *grad = p - weighted / total;
    return p.dot(y) - lse - model.weight_entropy;
}

} // namespace

RankOneOracleResult rank_one_convex_oracle(const BLDatum& d, const Eigen::VectorXd& y0,
                                           const DescentOptions& opts) {
    if (y0.size() != d.count()) throw UsageError("rank_one_convex_oracle: y0 length mismatch");
    const RankOneModel model = build_rank_one_model(d);
    const Eigen::VectorXd& p = d.weights();

    Eigen::VectorXd y = y0;
    Eigen::VectorXd grad(y.size());
    double fy = rank_one_value_grad(model, p, y, &grad);

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (grad.norm() <= opts.grad_tol) break;
        const double rounding_slack = 1e-13 * (1.0 + std::abs(fy));
        bool accepted = false;
        double eta = opts.step0;
        for (int bt = 0; bt < opts.max_backtracks && !accepted;
             ++bt, eta *= opts.backtrack_factor) {
            const Eigen::VectorXd candidate = y + eta * grad;
            Eigen::VectorXd cgrad(y.size());
            const double fc = rank_one_value_grad(model, p, candidate, &cgrad);
            if (fc >= fy + opts.armijo_slope * eta * grad.squaredNorm()) {
                y = candidate;
                fy = fc;
                grad = cgrad;
                accepted = true;
            } else if (fc >= fy - rounding_slack && cgrad.norm() <= 0.999 * grad.norm()) {
                // Ascent below the rounding resolution of f; go by the
                // gradient contraction instead.
                y = candidate;
                fy = fc;
                grad = cgrad;
                accepted = true;
            }
        }
        if (!accepted) break; // stalled at the numerical optimum
    }
    return RankOneOracleResult{y, fy, std::exp(0.5 * fy), iter};
}

} // namespace gct
