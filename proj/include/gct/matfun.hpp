#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gct/common.hpp"

namespace gct {

// Relative eigenvalue floor: construction of an SpdMatrix fails when
// lambda_min <= floor * lambda_max instead of clamping.
inline constexpr double kEigenvalueFloor = 1e-12;

// Real symmetric matrix. Entries are symmetrized on construction so that
// (i,j) == (j,i) holds exactly.
class SymMatrix {
public:
    explicit SymMatrix(const Eigen::MatrixXd& a);

    static SymMatrix Zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
    static SymMatrix Identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

    int order() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Eigen::MatrixXd m_;
};

// Symmetric positive definite matrix. Positivity is verified spectrally on
// construction against the relative floor.
class SpdMatrix {
public:
    explicit SpdMatrix(const SymMatrix& s, double rel_floor = kEigenvalueFloor);
    explicit SpdMatrix(const Eigen::MatrixXd& a, double rel_floor = kEigenvalueFloor)
        : SpdMatrix(SymMatrix(a), rel_floor) {}

    static SpdMatrix Identity(int n) { return SpdMatrix(SymMatrix::Identity(n)); }

    int order() const { return sym_.order(); }
    const SymMatrix& sym() const { return sym_; }
    const Eigen::MatrixXd& mat() const { return sym_.mat(); }
    double operator()(int i, int j) const { return sym_(i, j); }

private:
    SymMatrix sym_;
};

// Basis element E_ij of the symmetric matrices:
// e_i e_j^T + e_j e_i^T for i != j, e_i e_i^T for i == j.
struct SymBasisElement {
    int i;
    int j; // i <= j
    SymMatrix matrix;
};

// Eigendecomposition of a symmetric matrix. Eigenvalues are sorted in
// descending order; eigenvector columns follow the same order and carry a
// deterministic sign (largest-magnitude component positive).
struct SymEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

SymEig sym_eig(const SymMatrix& s);

// V diag(lambda^t) V^T. Fails with ConditioningError when an eigenvalue sits
// below the relative floor.
SpdMatrix spd_power(const SpdMatrix& p, double t);

SymMatrix spd_log(const SpdMatrix& p);
SpdMatrix sym_exp(const SymMatrix& s);

// Number of independent entries of an n x n symmetric matrix.
inline int sym_dim(int n) { return n * (n + 1) / 2; }

// Row-major index of the pair (i,j), i <= j, in the sym_basis ordering.
int sym_pair_index(int n, int i, int j);

// The ordered basis {E_ij}_{i<=j}, row-major in (i,j).
std::vector<SymBasisElement> sym_basis(int n);

// Coefficients of s in the sym_basis: flatten(s)[sym_pair_index(i,j)] = s(i,j).
Eigen::VectorXd sym_flatten(const SymMatrix& s);
SymMatrix sym_unflatten(int n, const Eigen::VectorXd& coords);

// log det of a positive definite matrix via Cholesky; the determinant ratio
// itself is never formed.
double spd_logdet(const Eigen::MatrixXd& m);

} // namespace gct
