#include <doctest.h>

#include "test_util.hpp"

using namespace gct;

namespace {

BLDatum identity_rows_datum() {
    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 0, 1).finished()};
    return BLDatum(2, rows, (Eigen::VectorXd(2) << 1, 1).finished());
}

BLDatum hoelder_scalar_datum() {
    std::vector<Eigen::MatrixXd> maps{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                      Eigen::MatrixXd::Ones(1, 1)};
    return BLDatum(1, maps, (Eigen::VectorXd(3) << 0.2, 0.3, 0.5).finished());
}

// Both rows collapse onto e_1: condition 2 fails on span(e_2).
BLDatum collapsed_datum() {
    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 1, 0).finished()};
    return BLDatum(2, rows, (Eigen::VectorXd(2) << 1, 1).finished());
}

} // namespace

TEST_CASE("scaling condition") {
    CHECK(check_scaling_condition(
        BLDatum(1, {Eigen::MatrixXd::Ones(1, 1)}, Eigen::VectorXd::Ones(1))));
    CHECK(check_scaling_condition(identity_rows_datum()));
    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 0, 1).finished()};
    CHECK_FALSE(check_scaling_condition(BLDatum(2, rows, (Eigen::VectorXd(2) << 1, 0.5).finished())));
}

TEST_CASE("non-degeneracy") {
    CHECK(check_nondegeneracy(identity_rows_datum()));

    std::vector<Eigen::MatrixXd> with_zero{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                           Eigen::MatrixXd::Zero(1, 2)};
    CHECK_FALSE(check_nondegeneracy(BLDatum(2, with_zero, (Eigen::VectorXd(2) << 1, 1).finished())));

    // Hoelder rows in dimension 2 fail the scaling condition.
    std::vector<Eigen::MatrixXd> hoelder2{(Eigen::MatrixXd(1, 2) << 1, 1).finished(),
                                          (Eigen::MatrixXd(1, 2) << 1, 1).finished()};
    CHECK_FALSE(
        check_nondegeneracy(BLDatum(2, hoelder2, (Eigen::VectorXd(2) << 0.5, 0.5).finished())));
}

TEST_CASE("heuristic feasibility: plausibility, refutation, precondition") {
    const FeasibilityReport ok = heuristic_feasibility(identity_rows_datum(), 20);
    CHECK(ok.plausible);
    CHECK(ok.subspaces_checked > 0);

    const FeasibilityReport bad = heuristic_feasibility(collapsed_datum(), 20);
    REQUIRE_FALSE(bad.plausible);
    REQUIRE(bad.witness.has_value());
    // The witness basis must span e_2 (the kernel common to both rows).
    const Eigen::MatrixXd& v = *bad.witness;
    CHECK(v.cols() == 1);
    CHECK(std::abs(v(0, 0)) <= 1e-9);
    CHECK(std::abs(v(1, 0)) == doctest::Approx(1.0));

    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 0, 1).finished()};
    const BLDatum off(2, rows, (Eigen::VectorXd(2) << 1, 0.5).finished());
    CHECK_THROWS_AS(heuristic_feasibility(off, 5), UsageError);
}

TEST_CASE("F_eval: worked values") {
    const BLDatum scalar(1, {Eigen::MatrixXd::Ones(1, 1)}, Eigen::VectorXd::Ones(1));
    for (double x : {0.3, 1.0, 7.0}) {
        CHECK(F_eval(scalar, SpdMatrix((Eigen::MatrixXd(1, 1) << x).finished())) ==
              doctest::Approx(0.0));
    }

    const BLDatum rows = identity_rows_datum();
    CHECK(F_eval(rows, SpdMatrix::Identity(2)) == doctest::Approx(0.0));

    Eigen::MatrixXd x(2, 2);
    x << 2, 1, 1, 2;
    CHECK(F_eval(rows, SpdMatrix(x)) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("F is scale invariant when the scaling condition holds") {
    std::mt19937_64 rng(157);
    for (int trial = 0; trial < 10; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(3, 5, rng);
        const SpdMatrix x = testutil::random_spd(3, rng);
        const double base = F_eval(d, x);
        for (double c : {0.1, 1.0, 10.0}) {
            CHECK(std::abs(F_eval(d, SpdMatrix(c * x.mat())) - base) <= 1e-10);
        }
    }
}

TEST_CASE("F_euclid_grad: critical point, scalar case, Euler identity") {
    const BLDatum rows = identity_rows_datum();
    CHECK(F_euclid_grad(rows, SpdMatrix::Identity(2)).mat().norm() <= 1e-12);

    const BLDatum scalar(1, {Eigen::MatrixXd::Ones(1, 1)}, Eigen::VectorXd::Ones(1));
    CHECK(std::abs(F_euclid_grad(scalar, SpdMatrix((Eigen::MatrixXd(1, 1) << 3.0).finished()))(0, 0)) <=
          1e-12);

    std::mt19937_64 rng(163);
    for (int trial = 0; trial < 10; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(2, 4, rng);
        const SpdMatrix x = testutil::random_spd(2, rng);
        const SymMatrix g = F_euclid_grad(d, x);
        // <grad F(X), X> = 0: differentiate F(cX) at c = 1.
        CHECK(std::abs((g.mat().array() * x.mat().array()).sum()) <= 1e-10);
    }
}

TEST_CASE("F_euclid_grad matches central finite differences") {
    std::mt19937_64 rng(167);
    for (int trial = 0; trial < 20; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(3, 5, rng);
        const SpdMatrix x = testutil::random_spd(3, rng);
        const SymMatrix g = F_euclid_grad(d, x);
        const SymMatrix dir = testutil::random_sym(3, 1.0, rng);
        const double h = 1e-5;
        const double fd = (F_eval(d, SpdMatrix(x.mat() + h * dir.mat())) -
                           F_eval(d, SpdMatrix(x.mat() - h * dir.mat()))) /
                          (2 * h);
        const double analytic = (g.mat().array() * dir.mat().array()).sum();
        CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    }
}

TEST_CASE("minimize_F: immediate convergence at critical points") {
    const BLResult at_identity = minimize_F(identity_rows_datum(), SpdMatrix::Identity(2));
    CHECK(at_identity.status == DescentStatus::Converged);
    CHECK(at_identity.iterations == 0);
    CHECK(at_identity.f_value == doctest::Approx(0.0));
    CHECK(at_identity.bl_constant == doctest::Approx(1.0));

    const BLResult hoelder = minimize_F(hoelder_scalar_datum(), SpdMatrix::Identity(1));
    CHECK(hoelder.f_value == doctest::Approx(0.0));
    CHECK(hoelder.bl_constant == doctest::Approx(1.0));
}

TEST_CASE("minimize_F descends to the optimum from a skewed start") {
    Eigen::MatrixXd x0(2, 2);
    x0 << 2, 1, 1, 2;
    const BLResult res = minimize_F(identity_rows_datum(), SpdMatrix(x0));
    CHECK(res.status == DescentStatus::Converged);
    CHECK(res.f_value <= 1e-12);
    CHECK(res.bl_constant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.gradient_norm <= 1e-8);
}

TEST_CASE("minimize_F rejects degenerate data") {
    std::vector<Eigen::MatrixXd> with_zero{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                           Eigen::MatrixXd::Zero(1, 2)};
    const BLDatum degenerate(2, with_zero, (Eigen::VectorXd(2) << 1, 1).finished());
    CHECK_THROWS_AS(minimize_F(degenerate, SpdMatrix::Identity(2)), UsageError);
}

TEST_CASE("minimize_F flags descent through the divergence floor") {
    // Non-degenerate but condition-2 infeasible: F is unbounded below. The
    // floor must sit above the point where det-preserving descent runs into
    // the positive-definiteness floor (here F ~ 2 log lambda_min).
    DescentOptions opts;
    opts.divergence_floor = -20.0;
    const BLResult res = minimize_F(collapsed_datum(), SpdMatrix::Identity(2), opts);
    CHECK(res.status == DescentStatus::DivergenceSuspected);
    CHECK(res.infeasible_suspected);
    CHECK(res.f_value < -20.0 + 1.0);
}

TEST_CASE("zero weights drop their terms") {
    std::vector<Eigen::MatrixXd> rows{(Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                      (Eigen::MatrixXd(1, 2) << 0, 1).finished(),
                                      (Eigen::MatrixXd(1, 2) << 3, 4).finished()};
    const BLDatum with_zero(2, rows, (Eigen::VectorXd(3) << 1, 1, 0).finished());
    const BLDatum without(2, {rows[0], rows[1]}, (Eigen::VectorXd(2) << 1, 1).finished());
    std::mt19937_64 rng(173);
    const SpdMatrix x = testutil::random_spd(2, rng);
    CHECK(F_eval(with_zero, x) == doctest::Approx(F_eval(without, x)));
    CHECK((F_euclid_grad(with_zero, x).mat() - F_euclid_grad(without, x).mat()).norm() <= 1e-14);
}

TEST_CASE("lieb_gaussian_value: identity, AM-GM, and scale behaviour") {
    const BLDatum rows = identity_rows_datum();
    std::vector<SpdMatrix> ones{SpdMatrix::Identity(1), SpdMatrix::Identity(1)};
    CHECK(lieb_gaussian_value(rows, ones) == doctest::Approx(1.0));

    const BLDatum hoelder = hoelder_scalar_datum();
    std::mt19937_64 rng(179);
    std::uniform_real_distribution<double> pos(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SpdMatrix> a;
        Eigen::Vector3d values;
        for (int j = 0; j < 3; ++j) {
            values(j) = pos(rng);
            a.push_back(SpdMatrix((Eigen::MatrixXd(1, 1) << values(j)).finished()));
        }
        const double val = lieb_gaussian_value(hoelder, a);
        // Direct formula: (prod a_j^{p_j} / sum p_j a_j)^{1/2} <= 1 by AM-GM.
        const Eigen::Vector3d p(0.2, 0.3, 0.5);
        double num = 1.0, den = 0.0;
        for (int j = 0; j < 3; ++j) {
            num *= std::pow(values(j), p(j));
            den += p(j) * values(j);
        }
        CHECK(val == doctest::Approx(std::sqrt(num / den)).epsilon(1e-12));
        CHECK(val <= 1.0 + 1e-12);

        // Rescaling every Gaussian leaves the value unchanged under condition 1.
        std::vector<SpdMatrix> scaled;
        for (int j = 0; j < 3; ++j) scaled.push_back(SpdMatrix(3.7 * a[j].mat()));
        CHECK(lieb_gaussian_value(hoelder, scaled) == doctest::Approx(val).epsilon(1e-12));
    }
}

TEST_CASE("gaussian values never exceed the BL constant") {
    std::mt19937_64 rng(181);
    for (int trial = 0; trial < 3; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(2, 4, rng);
        const BLResult res = minimize_F(d, SpdMatrix::Identity(2));
        REQUIRE(res.status == DescentStatus::Converged);
        for (int s = 0; s < 30; ++s) {
            std::vector<SpdMatrix> a;
            for (int j = 0; j < d.count(); ++j) a.push_back(testutil::random_spd(1, rng));
            CHECK(lieb_gaussian_value(d, a) <= res.bl_constant + 1e-6);
        }
    }
}

TEST_CASE("rank-one oracle: known data and agreement with the descent route") {
    const RankOneOracleResult rows_oracle =
        rank_one_convex_oracle(identity_rows_datum(), Eigen::VectorXd::Zero(2));
    CHECK(rows_oracle.bl_constant == doctest::Approx(1.0).epsilon(1e-9));

    const RankOneOracleResult hoelder_oracle =
        rank_one_convex_oracle(hoelder_scalar_datum(), Eigen::VectorXd::Zero(3));
    CHECK(hoelder_oracle.bl_constant == doctest::Approx(1.0).epsilon(1e-9));

    std::mt19937_64 rng(191);
    for (int trial = 0; trial < 5; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(2, 4, rng);
        const BLResult descent = minimize_F(d, SpdMatrix::Identity(2));
        const RankOneOracleResult oracle = rank_one_convex_oracle(d, Eigen::VectorXd::Zero(4));
        REQUIRE(descent.status == DescentStatus::Converged);
        CHECK(std::abs(descent.bl_constant - oracle.bl_constant) <= 1e-4);
    }
}

TEST_CASE("rank-one oracle rejects unsupported data") {
    std::vector<Eigen::MatrixXd> tall{Eigen::MatrixXd::Identity(2, 2)};
    const BLDatum not_rank_one(2, tall, Eigen::VectorXd::Ones(1));
    CHECK_THROWS_AS(rank_one_convex_oracle(not_rank_one, Eigen::VectorXd::Zero(1)), UsageError);
}

TEST_CASE("F is geodesically convex along SPD geodesics") {
    std::mt19937_64 rng(193);
    const ManifoldSpec spd2{ManifoldKind::SpdCone, 2};
    for (int trial = 0; trial < 10; ++trial) {
        const BLDatum d = testutil::random_rank_one_datum(2, 4, rng);
        const ScalarField field{spd2, [&d](const Point& x) { return F_eval(d, x.mat()); },
                                "F_{B,p}"};
        const Point p = sample_point(spd2, rng);
        const Point q = sample_point(spd2, rng);
        CHECK(second_order_test(field, p, q, default_t_grid()) >= -1e-6);
    }
}

TEST_CASE("Kadison inequality holds for the datum's positive maps") {
    std::mt19937_64 rng(197);
    for (int trial = 0; trial < 25; ++trial) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd b(2, 3); // full row rank almost surely
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 3; ++j) b(i, j) = gauss(rng);
        }
        SymLinearMap t = [b](const SymMatrix& x) { return SymMatrix(b * x.mat() * b.transpose()); };
        const SpdMatrix p = testutil::random_spd(3, rng);
        const SymMatrix x = testutil::random_sym(3, 1.5, rng);
        CHECK(kadison_residual(t, 3, p, x) >= -1e-10);
    }
}

TEST_CASE("BLDatum validates its invariants") {
    CHECK_THROWS_AS(BLDatum(0, {Eigen::MatrixXd::Ones(1, 1)}, Eigen::VectorXd::Ones(1)),
                    InputError);
    CHECK_THROWS_AS(BLDatum(2, {}, Eigen::VectorXd::Ones(0)), InputError);
    CHECK_THROWS_AS(
        BLDatum(2, {(Eigen::MatrixXd(1, 2) << 1, 0).finished()},
                (Eigen::VectorXd(1) << -0.5).finished()),
        InputError);
    CHECK_THROWS_AS(BLDatum(2, {Eigen::MatrixXd::Ones(1, 3)}, Eigen::VectorXd::Ones(1)),
                    InputError);
}
