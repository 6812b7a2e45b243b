#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gct/spd_descent.hpp"

namespace gct {

// Strictly positive square operator T(X) = sum_j A_j X A_j^T given by its
// Kraus family. Strict positivity is certified probabilistically at
// construction: seeded SPD probes plus a rank check of the Kraus Gram matrix.
class PositiveOperator {
public:
    explicit PositiveOperator(std::vector<Eigen::MatrixXd> kraus);

    int order() const { return n_; }
    int count() const { return static_cast<int>(kraus_.size()); }
    const std::vector<Eigen::MatrixXd>& kraus() const { return kraus_; }

private:
    int n_;
    std::vector<Eigen::MatrixXd> kraus_;
};

SymMatrix apply(const PositiveOperator& t, const SymMatrix& x);
SymMatrix apply_adjoint(const PositiveOperator& t, const SymMatrix& x);

// log det T(X) - log det X.
double log_capacity_eval(const PositiveOperator& t, const SpdMatrix& x);

// Euclidean gradient of the log capacity objective:
// sum_j A_j^T T(X)^{-1} A_j - X^{-1}.
SymMatrix capacity_euclid_grad(const PositiveOperator& t, const SpdMatrix& x);

struct CapacityResult {
    SpdMatrix x_star;
    double log_capacity;
    int iterations;
    double gradient_norm;
    DescentStatus status;
    bool capacity_zero_suspected; // descent fell through the divergence floor
};

// Geodesic descent on log det T(X) - log det X with Euclidean gradient
// sum_j A_j^T T(X)^{-1} A_j - X^{-1}.
CapacityResult capacity_minimize(const PositiveOperator& t, const SpdMatrix& x0,
                                 const DescentOptions& opts = {});

struct ScalingResult {
    SpdMatrix x_star;
    double log_capacity;
    std::vector<Eigen::MatrixXd> scaled; // A_hat_j = T(X*)^{-1/2} A_j (X*)^{1/2}
    double residual_left;                // || sum A_hat A_hat^T - I ||_F
    double residual_right;               // || sum A_hat^T A_hat - I ||_F
};

ScalingResult scale(const PositiveOperator& t, const SpdMatrix& x_star);

// Gurvits-style alternating normalization; an oracle independent of the
// descent path. The telescoped log det accumulators estimate log cap(T).
struct AlternatingResult {
    std::vector<Eigen::MatrixXd> kraus;  // transformed family
    std::vector<double> residual_trace;  // max(left,right) residual per sweep
    double log_capacity_estimate;
    int iterations;
    bool converged; // final residual <= tol
};

AlternatingResult alternating_scaling(const PositiveOperator& t, int max_iters = 1000,
                                      double tol = 1e-10);

// A positive linear map on symmetric matrices of a fixed input order; the
// output order may differ.
using SymLinearMap = std::function<SymMatrix(const SymMatrix&)>;

// T'(Y) = T(P)^{-1/2} T(P^{1/2} Y P^{1/2}) T(P)^{-1/2}; unital by construction.
SymLinearMap kadison_normalized_map(const SymLinearMap& t, int n_in, const SpdMatrix& p);

// eigmin(T'(X^2) - T'(X)^2); non-negative up to roundoff for every strictly
// positive T.
double kadison_residual(const SymLinearMap& t, int n_in, const SpdMatrix& p, const SymMatrix& x);
double kadison_residual(const PositiveOperator& t, const SpdMatrix& p, const SymMatrix& x);

} // namespace gct
