#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gct/spd_descent.hpp"

namespace gct {

// A Brascamp-Lieb datum: linear maps B_j in R^{n_j x n} with non-negative
// weights p_j.
class BLDatum {
public:
    BLDatum(int n, std::vector<Eigen::MatrixXd> maps, Eigen::VectorXd weights);

    int n() const { return n_; }
    int count() const { return static_cast<int>(maps_.size()); }
    const std::vector<Eigen::MatrixXd>& maps() const { return maps_; }
    const Eigen::VectorXd& weights() const { return weights_; }

private:
    int n_;
    std::vector<Eigen::MatrixXd> maps_;
    Eigen::VectorXd weights_;
};

// Feasibility condition 1: n == sum_j p_j n_j.
bool check_scaling_condition(const BLDatum& d);

// Condition 1 plus full row rank of every B_j.
bool check_nondegeneracy(const BLDatum& d);

// Heuristic probe of feasibility condition 2 over coordinate subspaces plus
// `trials` random subspaces. Refutation is exact (a concrete violating
// subspace); plausibility is only evidence.
struct FeasibilityReport {
    bool plausible;
    std::optional<Eigen::MatrixXd> witness; // orthonormal basis of a violating V
    int subspaces_checked;
};

FeasibilityReport heuristic_feasibility(const BLDatum& d, int trials,
                                        std::uint64_t seed = 0x5eed5eedULL);

// F(X) = sum_j p_j log det(B_j X B_j^T) - log det X.
double F_eval(const BLDatum& d, const SpdMatrix& x);

// grad F = sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j - X^{-1}.
SymMatrix F_euclid_grad(const BLDatum& d, const SpdMatrix& x);

struct BLResult {
    SpdMatrix x_star;
    double f_value;
    double bl_constant; // exp(-f_value / 2)
    int iterations;
    double gradient_norm;
    DescentStatus status;
    bool infeasible_suspected; // descent fell through the divergence floor
};

BLResult minimize_F(const BLDatum& d, const SpdMatrix& x0, const DescentOptions& opts = {});

double bl_constant(const BLDatum& d, const DescentOptions& opts = {});

// Lieb's Gaussian evaluator:
// (prod_j det(A_j)^{p_j} / det(sum_j p_j B_j^T A_j B_j))^{1/2}.
// Every value is a lower bound on BL(B,p).
double lieb_gaussian_value(const BLDatum& d, const std::vector<SpdMatrix>& a);

// Concave reformulation for rank-one data (all n_j == 1):
// f(y) = <p,y> - log sum_{|alpha|=n} c_alpha e^{<alpha,y>} - sum_j p_j log p_j
// with c_alpha = det(B_alpha)^2, maximized by gradient ascent.
struct RankOneOracleResult {
    Eigen::VectorXd y_star;
    double value;       // sup f
    double bl_constant; // exp(value / 2)
    int iterations;
};

RankOneOracleResult rank_one_convex_oracle(const BLDatum& d, const Eigen::VectorXd& y0,
                                           const DescentOptions& opts = {});

} // namespace gct
