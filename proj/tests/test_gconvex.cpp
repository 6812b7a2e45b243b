#include <doctest.h>

#include "test_util.hpp"

using namespace gct;

namespace {

const ManifoldSpec kEuclid1{ManifoldKind::Euclidean, 1};
const ManifoldSpec kOrthant2{ManifoldKind::PositiveOrthant, 2};
const ManifoldSpec kSpd2{ManifoldKind::SpdCone, 2};

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_CASE("midpoint_test: geodesically linear functions meet the chord") {
    std::mt19937_64 rng(131);
    const ScalarField logbarrier = builtin_field("logbarrier", kOrthant2);
    const ScalarField logdet = builtin_field("logdet", kSpd2);
    const auto grid = default_t_grid();

    for (int trial = 0; trial < 10; ++trial) {
        {
            const Point p = sample_point(kOrthant2, rng);
            const Point q = sample_point(kOrthant2, rng);
            const ConvexityReport rep = midpoint_test(logbarrier, p, q, grid);
            CHECK(rep.verdict == ConvexityReport::Verdict::consistent);
            CHECK(std::abs(rep.min_second_difference) <= 1e-7);
            const double fp = logbarrier.eval(p), fq = logbarrier.eval(q);
            for (double t : {0.25, 0.5, 0.75}) {
                const double chord = (1 - t) * fp + t * fq;
                CHECK(logbarrier.eval(geodesic_point(p, q, t)) ==
                      doctest::Approx(chord).epsilon(1e-10));
            }
        }
        {
            const Point p = sample_point(kSpd2, rng);
            const Point q = sample_point(kSpd2, rng);
            const ConvexityReport rep = midpoint_test(logdet, p, q, grid);
            CHECK(rep.verdict == ConvexityReport::Verdict::consistent);
            CHECK(std::abs(rep.min_second_difference) <= 1e-6);
        }
    }
}

TEST_CASE("midpoint_test: sin(x)exp(x/12) violates on the documented pair") {
    const ScalarField f = builtin_field("sin-exp", kEuclid1);
    const Point p(kEuclid1, vec1(2.0));
    const Point q(kEuclid1, vec1(8.0));
    const ConvexityReport rep = midpoint_test(f, p, q, default_t_grid());
    REQUIRE(rep.verdict == ConvexityReport::Verdict::violated);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->gap < -kTolEq);
    // Grid-search oracle: the violation sits near the right endpoint.
    CHECK(rep.witness->t > 0.9);
}

TEST_CASE("midpoint_test flags non-finite evaluations with the location") {
    const ScalarField partial{kOrthant2,
                              [](const Point& p) { return std::log(p.vec()(0) - 5.0); },
                              "log(x1-5)"};
    const Point p(kOrthant2, vec2(1.0, 1.0));
    const Point q(kOrthant2, vec2(2.0, 2.0));
    CHECK_THROWS_AS(midpoint_test(partial, p, q, default_t_grid()), EvaluationError);
}

TEST_CASE("first_order_test: coincident endpoints and the (log x)^2 example") {
    const ScalarField logsq{ManifoldSpec{ManifoldKind::PositiveOrthant, 1},
                            [](const Point& p) {
                                const double l = std::log(p.vec()(0));
                                return l * l;
                            },
                            "(log x)^2"};
    const ManifoldSpec o1{ManifoldKind::PositiveOrthant, 1};
    const Point p(o1, vec1(2.0));

    const FirstOrderResult same = first_order_test(logsq, p, p);
    CHECK(same.ok);
    CHECK(same.lhs == doctest::Approx(same.rhs).epsilon(1e-9));

    // Analytic slope along the geodesic at p: 2 log(p) log(q/p).
    for (double qv : {0.3, 1.0, 4.0, 7.5}) {
        const Point q(o1, vec1(qv));
        const FirstOrderResult res = first_order_test(logsq, p, q);
        const double expected_lhs =
            std::pow(std::log(2.0), 2) + 2.0 * std::log(2.0) * std::log(qv / 2.0);
        CHECK(res.lhs == doctest::Approx(expected_lhs).epsilon(1e-6));
        CHECK(res.rhs == doctest::Approx(std::pow(std::log(qv), 2)));
        CHECK(res.ok);
    }
}

TEST_CASE("first_order_test holds for the monomial on random pairs") {
    std::mt19937_64 rng(137);
    const ScalarField mono = builtin_field("monomial", kOrthant2);
    for (int trial = 0; trial < 50; ++trial) {
        const Point p = sample_point(kOrthant2, rng);
        const Point q = sample_point(kOrthant2, rng);
        CHECK(first_order_test(mono, p, q).ok);
    }
}

TEST_CASE("second_order_test: linear, convex, and equality cases") {
    std::mt19937_64 rng(139);
    const auto grid = default_t_grid();

    const ScalarField logbarrier = builtin_field("logbarrier", kOrthant2);
    for (int trial = 0; trial < 10; ++trial) {
        const Point p = sample_point(kOrthant2, rng);
        const Point q = sample_point(kOrthant2, rng);
        CHECK(std::abs(second_order_test(logbarrier, p, q, grid)) <= 1e-7);
    }

    // log p(x) with p(x) = 1 + x1 + x1 x2^2.
    const ScalarField logpoly{kOrthant2,
                              [](const Point& p) {
                                  const double x1 = p.vec()(0), x2 = p.vec()(1);
                                  return std::log(1.0 + x1 + x1 * x2 * x2);
                              },
                              "log(1+x1+x1*x2^2)"};
    for (int trial = 0; trial < 20; ++trial) {
        const Point p = sample_point(kOrthant2, rng);
        const Point q = sample_point(kOrthant2, rng);
        CHECK(second_order_test(logpoly, p, q, grid) >= -1e-8);
    }

    // -logdet restricted to a constant-determinant chord is flat.
    const ScalarField neg_logdet = builtin_field("neg-logdet", kSpd2);
    auto normalize = [](const SpdMatrix& raw) {
        const double det = raw.mat().determinant();
        return SpdMatrix(raw.mat() / std::sqrt(det));
    };
    for (int trial = 0; trial < 10; ++trial) {
        const Point p(kSpd2, normalize(testutil::random_spd(2, rng)));
        const Point q(kSpd2, normalize(testutil::random_spd(2, rng)));
        CHECK(std::abs(second_order_test(neg_logdet, p, q, grid)) <= 1e-8);
    }
}

TEST_CASE("violation_search: certificates and clean bills") {
    const ScalarField logdet = builtin_field("logdet", kSpd2);
    const ConvexityReport clean =
        violation_search(logdet, default_pair_sampler(kSpd2), 500, kDefaultSeed);
    CHECK(clean.verdict == ConvexityReport::Verdict::consistent);
    CHECK(clean.samples == 500L * kDefaultTGridSize);
    CHECK(clean.seed == kDefaultSeed);

    const ScalarField sinexp = builtin_field("sin-exp", kEuclid1);
    const ConvexityReport witness =
        violation_search(sinexp, default_pair_sampler(kEuclid1), 100, kDefaultSeed);
    REQUIRE(witness.verdict == ConvexityReport::Verdict::violated);
    REQUIRE(witness.witness.has_value());
    // The witness is a certificate: exact re-evaluation reproduces the gap.
    const ConvexityWitness& w = *witness.witness;
    const double chord = (1 - w.t) * sinexp.eval(w.p) + w.t * sinexp.eval(w.q);
    CHECK(chord - sinexp.eval(geodesic_point(w.p, w.q, w.t)) ==
          doctest::Approx(w.gap).epsilon(1e-12));

    const ScalarField mixed = builtin_field("logx1-minus-x2", kOrthant2);
    const ConvexityReport mixed_rep =
        violation_search(mixed, default_pair_sampler(kOrthant2), 200, kDefaultSeed);
    CHECK(mixed_rep.verdict == ConvexityReport::Verdict::violated);
}

TEST_CASE("violation_search is deterministic in the seed") {
    const ScalarField sinexp = builtin_field("sin-exp", kEuclid1);
    const ConvexityReport a =
        violation_search(sinexp, default_pair_sampler(kEuclid1), 50, 99);
    const ConvexityReport b =
        violation_search(sinexp, default_pair_sampler(kEuclid1), 50, 99);
    REQUIRE(a.verdict == b.verdict);
    REQUIRE(a.witness.has_value());
    CHECK(a.witness->t == b.witness->t);
    CHECK(a.witness->gap == b.witness->gap);
    CHECK(a.samples == b.samples);
}

TEST_CASE("the built-in g-convex suite stays consistent under search") {
    std::uint64_t seed = 1234;
    for (const ManifoldSpec& m : {kOrthant2, kSpd2}) {
        for (const ScalarField& f : g_convex_suite(m)) {
            const ConvexityReport rep =
                violation_search(f, default_pair_sampler(m), 200, seed++);
            CHECK_MESSAGE(rep.verdict == ConvexityReport::Verdict::consistent, f.name);
        }
    }
}

TEST_CASE("characterizations agree: second order implies midpoint and first order") {
    std::mt19937_64 rng(149);
    const auto grid = default_t_grid(65);
    for (const ManifoldSpec& m : {kOrthant2, kSpd2}) {
        for (const ScalarField& f : g_convex_suite(m)) {
            for (int trial = 0; trial < 5; ++trial) {
                const Point p = sample_point(m, rng);
                const Point q = sample_point(m, rng);
                if (second_order_test(f, p, q, grid) >= -kTolIneq) {
                    CHECK(midpoint_test(f, p, q, grid).verdict ==
                          ConvexityReport::Verdict::consistent);
                    CHECK(first_order_test(f, p, q).ok);
                }
            }
        }
    }
}

TEST_CASE("Loewner-order convexity of strictly positive maps along SPD geodesics") {
    std::mt19937_64 rng(151);
    const ManifoldSpec spd3{ManifoldKind::SpdCone, 3};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const PositiveOperator t = testutil::random_operator(3, 3, rng);
        const Point p = sample_point(spd3, rng);
        const Point q = sample_point(spd3, rng);
        const Eigen::MatrixXd tp = apply(t, p.mat().sym()).mat();
        const Eigen::MatrixXd tq = apply(t, q.mat().sym()).mat();
        for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const Eigen::MatrixXd mid = apply(t, geodesic_point(p, q, s).mat().sym()).mat();
            const SymEig eig = sym_eig(SymMatrix((1 - s) * tp + s * tq - mid));
            worst = std::min(worst, eig.values(eig.values.size() - 1));
        }
    }
    CHECK(worst >= -1e-8);
}

TEST_CASE("builtin_field rejects unknown names") {
    CHECK_THROWS_AS(builtin_field("not-a-function", kOrthant2), InputError);
    CHECK_THROWS_AS(builtin_field("logdet", kOrthant2), InputError);
}
