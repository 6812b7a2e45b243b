#include "gct/operator_scaling.hpp"

#include <cmath>
#include <random>

namespace gct {

namespace {

constexpr std::uint64_t kProbeSeed = 0x0b5e55edULL;
constexpr int kPositivityProbes = 20;

Eigen::MatrixXd kraus_sum(const std::vector<Eigen::MatrixXd>& kraus, const Eigen::MatrixXd& x,
                          bool adjoint) {
    const Eigen::Index n = kraus.front().rows();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : kraus) {
        if (adjoint) {
            acc += a.transpose() * x * a;
        } else {
            acc += a * x * a.transpose();
        }
    }
    return acc;
}

SymMatrix random_probe(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            s(i, j) = entry(rng);
            s(j, i) = s(i, j);
        }
    }
    return SymMatrix(s);
}

bool is_spd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

} // namespace

PositiveOperator::PositiveOperator(std::vector<Eigen::MatrixXd> kraus)
    : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw InputError("PositiveOperator: empty Kraus family");
    n_ = static_cast<int>(kraus_.front().rows());
    for (const auto& a : kraus_) {
        if (a.rows() != n_ || a.cols() != n_) {
            throw InputError("PositiveOperator: Kraus operators must be square and equally sized");
        }
        if (!a.allFinite()) throw InputError("PositiveOperator: non-finite entries");
    }

    // Rank check of sum_j vec(A_j) vec(A_j)^T: the family must not vanish.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_ * n_, n_ * n_);
    for (const auto& a : kraus_) {
        const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
        gram += v * v.transpose();
    }
    if (!(gram.norm() > 0.0)) throw InputError("PositiveOperator: zero operator");

    std::mt19937_64 rng(kProbeSeed);
    for (int probe = 0; probe < kPositivityProbes; ++probe) {
        const SpdMatrix x = sym_exp(random_probe(n_, rng));
        if (!is_spd(kraus_sum(kraus_, x.mat(), false))) {
            throw InputError("PositiveOperator: strict positivity probe failed");
        }
    }
}

SymMatrix apply(const PositiveOperator& t, const SymMatrix& x) {
    if (x.order() != t.order()) throw UsageError("apply: size mismatch");
    return SymMatrix(kraus_sum(t.kraus(), x.mat(), false));
}

SymMatrix apply_adjoint(const PositiveOperator& t, const SymMatrix& x) {
    if (x.order() != t.order()) throw UsageError("apply_adjoint: size mismatch");
    return SymMatrix(kraus_sum(t.kraus(), x.mat(), true));
}

double log_capacity_eval(const PositiveOperator& t, const SpdMatrix& x) {
    if (x.order() != t.order()) throw UsageError("log_capacity_eval: size mismatch");
    return spd_logdet(kraus_sum(t.kraus(), x.mat(), false)) - spd_logdet(x.mat());
}

SymMatrix capacity_euclid_grad(const PositiveOperator& t, const SpdMatrix& x) {
    if (x.order() != t.order()) throw UsageError("capacity_euclid_grad: size mismatch");
    const Eigen::MatrixXd tx = kraus_sum(t.kraus(), x.mat(), false);
    Eigen::LLT<Eigen::MatrixXd> llt(tx);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("capacity_euclid_grad: T(X) is not positive definite");
    }
    Eigen::MatrixXd g = -spd_power(x, -1.0).mat();
    for (const auto& a : t.kraus()) g += a.transpose() * llt.solve(a);
    return SymMatrix(g);
}

CapacityResult capacity_minimize(const PositiveOperator& t, const SpdMatrix& x0,
                                 const DescentOptions& opts) {
    const DescentResult res = geodesic_descent(
        [&t](const SpdMatrix& x) { return log_capacity_eval(t, x); },
        [&t](const SpdMatrix& x) { return capacity_euclid_grad(t, x); }, x0, opts);
    return CapacityResult{res.x,
                          res.value,
                          res.iterations,
                          res.gradient_norm,
                          res.status,
                          res.status == DescentStatus::DivergenceSuspected};
}

ScalingResult scale(const PositiveOperator& t, const SpdMatrix& x_star) {
    if (x_star.order() != t.order()) throw UsageError("scale: size mismatch");
    const int n = t.order();
    const SpdMatrix tx(kraus_sum(t.kraus(), x_star.mat(), false));
    const Eigen::MatrixXd tx_inv_half = spd_power(tx, -0.5).mat();
    const Eigen::MatrixXd x_half = spd_power(x_star, 0.5).mat();

    ScalingResult out{x_star, log_capacity_eval(t, x_star), {}, 0.0, 0.0};
    out.scaled.reserve(t.kraus().size());
    for (const auto& a : t.kraus()) out.scaled.push_back(tx_inv_half * a * x_half);

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    out.residual_left = (kraus_sum(out.scaled, eye, false) - eye).norm();
    out.residual_right = (kraus_sum(out.scaled, eye, true) - eye).norm();
    return out;
}

AlternatingResult alternating_scaling(const PositiveOperator& t, int max_iters, double tol) {
    if (max_iters < 1) throw UsageError("alternating_scaling: need at least one iteration");
    const int n = t.order();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    std::vector<Eigen::MatrixXd> kraus = t.kraus();
    AlternatingResult out{{}, {}, 0.0, 0, false};

    for (int iter = 0; iter < max_iters; ++iter) {
        const Eigen::MatrixXd row_sum = kraus_sum(kraus, eye, false);
        if (!is_spd(row_sum)) {
            throw ConditioningError("alternating_scaling: row normalizer is singular");
        }
        out.log_capacity_estimate += spd_logdet(row_sum);
        const Eigen::MatrixXd row_inv_half = spd_power(SpdMatrix(row_sum), -0.5).mat();
        for (auto& a : kraus) a = row_inv_half * a;

        const Eigen::MatrixXd col_sum = kraus_sum(kraus, eye, true);
        if (!is_spd(col_sum)) {
            throw ConditioningError("alternating_scaling: column normalizer is singular");
        }
        out.log_capacity_estimate += spd_logdet(col_sum);
        const Eigen::MatrixXd col_inv_half = spd_power(SpdMatrix(col_sum), -0.5).mat();
        for (auto& a : kraus) a = a * col_inv_half;

        const double res_left = (kraus_sum(kraus, eye, false) - eye).norm();
        const double res_right = (kraus_sum(kraus, eye, true) - eye).norm();
        const double residual = std::max(res_left, res_right);
        out.residual_trace.push_back(residual);
        out.iterations = iter + 1;
        if (residual <= tol) {
            out.converged = true;
            break;
        }
    }
    out.kraus = std::move(kraus);
    return out;
}

SymLinearMap kadison_normalized_map(const SymLinearMap& t, int n_in, const SpdMatrix& p) {
    if (p.order() != n_in) throw UsageError("kadison_normalized_map: base point size mismatch");
    const Eigen::MatrixXd p_half = spd_power(p, 0.5).mat();
    const SymMatrix tp = t(SymMatrix(p.mat()));
    const Eigen::MatrixXd tp_inv_half = spd_power(SpdMatrix(tp), -0.5).mat();

    SymLinearMap normalized = [t, p_half, tp_inv_half](const SymMatrix& y) {
        const SymMatrix inner(p_half * y.mat() * p_half);
        return SymMatrix(tp_inv_half * t(inner).mat() * tp_inv_half);
    };

    // Unital sanity: T'(I) == I.
    const Eigen::MatrixXd unital = normalized(SymMatrix::Identity(n_in)).mat();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(unital.rows(), unital.cols());
    if ((unital - eye).norm() > 1e-8 * std::max(1.0, eye.norm())) {
        throw ConditioningError("kadison_normalized_map: normalized map is not unital");
    }
    return normalized;
}

double kadison_residual(const SymLinearMap& t, int n_in, const SpdMatrix& p, const SymMatrix& x) {
    if (x.order() != n_in) throw UsageError("kadison_residual: argument size mismatch");
    const SymLinearMap tp = kadison_normalized_map(t, n_in, p);
    const SymMatrix tx = tp(x);
    const SymMatrix tx2 = tp(SymMatrix(x.mat() * x.mat()));
    const SymMatrix gap(tx2.mat() - tx.mat() * tx.mat());
    const SymEig eig = sym_eig(gap);
    return eig.values(eig.values.size() - 1);
}

double kadison_residual(const PositiveOperator& t, const SpdMatrix& p, const SymMatrix& x) {
    SymLinearMap map = [&t](const SymMatrix& y) { return apply(t, y); };
    return kadison_residual(map, t.order(), p, x);
}

} // namespace gct
