#include "gct/matfun.hpp"

#include <cmath>

namespace gct {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
    return 0.5 * (a + a.transpose());
}

// Flip each eigenvector so its largest-magnitude component is positive.
// Ties resolve to the lowest index, so traces are reproducible across runs.
void fix_eigenvector_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = 0.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            const double m = std::abs(v(r, c));
            if (m > best) {
                best = m;
                arg = r;
            }
        }
        if (v(arg, c) < 0.0) v.col(c) = -v.col(c);
    }
}

} // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw InputError("SymMatrix: matrix must be square and non-empty");
    }
    if (!a.allFinite()) {
        throw InputError("SymMatrix: non-finite entries");
    }
    m_ = symmetrized(a);
}

SpdMatrix::SpdMatrix(const SymMatrix& s, double rel_floor) : sym_(s) {
    const SymEig eig = sym_eig(s);
    const double lmax = eig.values(0);
    const double lmin = eig.values(eig.values.size() - 1);
    if (!(lmin > 0.0) || lmin <= rel_floor * std::abs(lmax)) {
        throw ConditioningError("SpdMatrix: eigenvalue below positive-definiteness floor");
    }
}

SymEig sym_eig(const SymMatrix& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.mat());
    if (solver.info() != Eigen::Success) {
        throw ConditioningError("sym_eig: eigendecomposition failed");
    }
    const int n = s.order();
    SymEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    // Eigen sorts ascending; we expose descending.
    for (int k = 0; k < n; ++k) {
        out.values(k) = solver.eigenvalues()(n - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    fix_eigenvector_signs(out.vectors);
    return out;
}

namespace {

// V f(lambda) V^T with re-symmetrization of the assembled product.
template <typename Fn>
Eigen::MatrixXd spectral_map(const SpdMatrix& p, Fn&& fn) {
    const SymEig eig = sym_eig(p.sym());
    const double lmax = std::abs(eig.values(0));
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) <= kEigenvalueFloor * lmax) {
            throw ConditioningError("matfun: eigenvalue below floor in spectral map");
        }
    }
    Eigen::VectorXd mapped(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) mapped(k) = fn(eig.values(k));
    const Eigen::MatrixXd m =
        eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
    return symmetrized(m);
}

} // namespace

SpdMatrix spd_power(const SpdMatrix& p, double t) {
    return SpdMatrix(spectral_map(p, [t](double l) { return std::pow(l, t); }));
}

SymMatrix spd_log(const SpdMatrix& p) {
    return SymMatrix(spectral_map(p, [](double l) { return std::log(l); }));
}

SpdMatrix sym_exp(const SymMatrix& s) {
    const SymEig eig = sym_eig(s);
    Eigen::VectorXd mapped(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) mapped(k) = std::exp(eig.values(k));
    const Eigen::MatrixXd m =
        eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
    return SpdMatrix(SymMatrix(symmetrized(m)));
}

int sym_pair_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n) throw UsageError("sym_pair_index: index out of range");
    return i * n - i * (i - 1) / 2 + (j - i);
}

std::vector<SymBasisElement> sym_basis(int n) {
    if (n < 1) throw UsageError("sym_basis: order must be positive");
    std::vector<SymBasisElement> basis;
    basis.reserve(static_cast<size_t>(sym_dim(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            basis.push_back(SymBasisElement{i, j, SymMatrix(e)});
        }
    }
    return basis;
}

Eigen::VectorXd sym_flatten(const SymMatrix& s) {
    const int n = s.order();
    Eigen::VectorXd coords(sym_dim(n));
    int a = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) coords(a++) = s(i, j);
    }
    return coords;
}

double spd_logdet(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("spd_logdet: matrix is not positive definite");
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

SymMatrix sym_unflatten(int n, const Eigen::VectorXd& coords) {
    if (coords.size() != sym_dim(n)) {
        throw UsageError("sym_unflatten: coordinate length does not match order");
    }
    Eigen::MatrixXd m(n, n);
    int a = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            m(i, j) = coords(a);
            m(j, i) = coords(a);
            ++a;
        }
    }
    return SymMatrix(m);
}

} // namespace gct
