#include <doctest.h>

#include "test_util.hpp"

using namespace gct;

namespace {

// Independent oracle: eigenvalues of a symmetric 2x2 matrix from the
// characteristic polynomial.
std::pair<double, double> eig2_oracle(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return {mean + disc, mean - disc};
}

} // namespace

TEST_CASE("sym_eig on the identity and diagonal matrices") {
    const SymEig id = sym_eig(SymMatrix::Identity(2));
    CHECK(id.values(0) == doctest::Approx(1.0));
    CHECK(id.values(1) == doctest::Approx(1.0));

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const SymEig de = sym_eig(SymMatrix(d));
    CHECK(de.values(0) == doctest::Approx(9.0));
    CHECK(de.values(1) == doctest::Approx(4.0));
    CHECK(std::abs(de.vectors(1, 0)) == doctest::Approx(1.0)); // axis-aligned
    CHECK(std::abs(de.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig matches the 2x2 characteristic polynomial oracle") {
    Eigen::MatrixXd m(2, 2);
    m << 2, 1, 1, 2;
    const auto [hi, lo] = eig2_oracle(2, 1, 2);
    CHECK(hi == doctest::Approx(3.0)); // the hand-solved values
    CHECK(lo == doctest::Approx(1.0));

    const SymEig eig = sym_eig(SymMatrix(m));
    CHECK(eig.values(0) == doctest::Approx(hi));
    CHECK(eig.values(1) == doctest::Approx(lo));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(eig.vectors(0, 0) == doctest::Approx(inv_sqrt2));
    CHECK(eig.vectors(1, 0) == doctest::Approx(inv_sqrt2));
    CHECK(eig.vectors(0, 1) == doctest::Approx(inv_sqrt2));
    CHECK(eig.vectors(1, 1) == doctest::Approx(-inv_sqrt2));
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMatrix s = testutil::random_sym(4, 3.0, rng);
        const SymEig eig = sym_eig(s);
        const Eigen::MatrixXd recon =
            eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
        CHECK((recon - s.mat()).norm() <= 1e-12 * std::max(1.0, s.mat().norm()));
        CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(4, 4)).norm() <=
              1e-12);
        for (int k = 0; k + 1 < 4; ++k) CHECK(eig.values(k) >= eig.values(k + 1));
    }
}

TEST_CASE("sym_eig rejects non-finite input") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 0, 0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(SymMatrix{m}, InputError);
}

TEST_CASE("spd_power: identity, diagonal square root, inverse") {
    CHECK((spd_power(SpdMatrix::Identity(3), 0.7).mat() - Eigen::MatrixXd::Identity(3, 3))
              .norm() <= 1e-14);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const Eigen::MatrixXd root = spd_power(SpdMatrix(d), 0.5).mat();
    CHECK(root(0, 0) == doctest::Approx(2.0));
    CHECK(root(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(root(0, 1)) <= 1e-14);

    std::mt19937_64 rng(11);
    const SpdMatrix p = testutil::random_spd(3, rng);
    const Eigen::MatrixXd inv = spd_power(p, -1.0).mat();
    // Oracle: direct linear solve.
    const Eigen::MatrixXd solved = p.mat().ldlt().solve(Eigen::MatrixXd::Identity(3, 3));
    CHECK((inv - solved).norm() <= 1e-10 * solved.norm());
}

TEST_CASE("spd_power exponent addition law") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> expo(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const SpdMatrix p = testutil::random_spd(3, rng);
        const double s = expo(rng), t = expo(rng);
        const Eigen::MatrixXd lhs = spd_power(p, s).mat() * spd_power(p, t).mat();
        const Eigen::MatrixXd rhs = spd_power(p, s + t).mat();
        CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
    }
}

TEST_CASE("spd_power maps eigenvalues through the scalar power") {
    std::mt19937_64 rng(17);
    const SpdMatrix p = testutil::random_spd(3, rng);
    const SymEig before = sym_eig(p.sym());
    const SymEig after = sym_eig(spd_power(p, 0.37).sym());
    for (int k = 0; k < 3; ++k) {
        CHECK(after.values(k) == doctest::Approx(std::pow(before.values(k), 0.37)));
    }
}

TEST_CASE("spd_log and sym_exp: diagonal examples and round trips") {
    CHECK(spd_log(SpdMatrix::Identity(3)).mat().norm() <= 1e-14);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = std::exp(1.0);
    d(1, 1) = std::exp(2.0);
    const Eigen::MatrixXd lg = spd_log(SpdMatrix(d)).mat();
    CHECK(lg(0, 0) == doctest::Approx(1.0));
    CHECK(lg(1, 1) == doctest::Approx(2.0));

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
    s(1, 1) = 1.0;
    const Eigen::MatrixXd ex = sym_exp(SymMatrix(s)).mat();
    CHECK(ex(0, 0) == doctest::Approx(1.0));
    CHECK(ex(1, 1) == doctest::Approx(std::exp(1.0)));

    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const SpdMatrix p = testutil::random_spd(3, rng);
        CHECK((sym_exp(spd_log(p)).mat() - p.mat()).norm() <= 1e-10 * p.mat().norm());

        const SymMatrix x = testutil::random_sym(3, 2.0, rng);
        const Eigen::MatrixXd prod = sym_exp(x).mat() * sym_exp(SymMatrix(-x.mat())).mat();
        CHECK((prod - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-9);
    }
}

TEST_CASE("SpdMatrix enforces the eigenvalue floor loudly") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(1, 1) = 1e-15;
    CHECK_THROWS_AS(SpdMatrix{bad}, ConditioningError);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(SpdMatrix{bad}, ConditioningError);
}

TEST_CASE("sym_basis ordering and span") {
    const auto b1 = sym_basis(1);
    REQUIRE(b1.size() == 1);
    CHECK(b1[0].matrix.mat()(0, 0) == 1.0);

    const auto b2 = sym_basis(2);
    REQUIRE(b2.size() == 3);
    CHECK(b2[0].i == 0);
    CHECK(b2[0].j == 0);
    CHECK(b2[1].i == 0);
    CHECK(b2[1].j == 1);
    CHECK(b2[2].i == 1);
    CHECK(b2[2].j == 1);
    // E_12 = e_1 e_2^T + e_2 e_1^T
    Eigen::MatrixXd e12 = Eigen::MatrixXd::Zero(2, 2);
    e12(0, 1) = 1.0;
    e12(1, 0) = 1.0;
    CHECK((b2[1].matrix.mat() - e12).norm() == 0.0);

    // Oracle for linear independence: rank of the vectorized stack.
    const auto b3 = sym_basis(3);
    REQUIRE(b3.size() == 6);
    Eigen::MatrixXd stack(6, 9);
    for (int r = 0; r < 6; ++r) {
        stack.row(r) = Eigen::Map<const Eigen::VectorXd>(b3[static_cast<size_t>(r)].matrix.mat().data(), 9);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(stack);
    CHECK(lu.rank() == 6);
}

TEST_CASE("sym flattening round trip and index layout") {
    std::mt19937_64 rng(23);
    const SymMatrix s = testutil::random_sym(4, 2.0, rng);
    const Eigen::VectorXd coords = sym_flatten(s);
    REQUIRE(coords.size() == sym_dim(4));
    CHECK((sym_unflatten(4, coords).mat() - s.mat()).norm() == 0.0);
    CHECK(coords(sym_pair_index(4, 1, 2)) == s(1, 2));
    CHECK(sym_pair_index(4, 2, 1) == sym_pair_index(4, 1, 2));

    // The coordinates are basis coefficients: s == sum coords_a E_a.
    Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(4, 4);
    const auto basis = sym_basis(4);
    for (size_t a = 0; a < basis.size(); ++a) {
        recon += coords(static_cast<Eigen::Index>(a)) * basis[a].matrix.mat();
    }
    CHECK((recon - s.mat()).norm() <= 1e-14);
}

TEST_CASE("spd_logdet agrees with the eigenvalue route") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const SpdMatrix p = testutil::random_spd(4, rng);
        const SymEig eig = sym_eig(p.sym());
        const double via_eig = eig.values.array().log().sum();
        CHECK(spd_logdet(p.mat()) == doctest::Approx(via_eig).epsilon(1e-10));
    }
}
