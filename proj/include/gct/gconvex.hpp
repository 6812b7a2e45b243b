#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gct/manifold.hpp"

namespace gct {

// Equality-type checks (exact evaluations along the geodesic).
inline constexpr double kTolEq = 1e-8;
// Inequality checks that involve finite differences.
inline constexpr double kTolIneq = 1e-6;
// Step for the geodesic directional derivative in first_order_test.
inline constexpr double kFirstOrderStep = 1e-5;
// Default number of uniform t samples in [0,1].
inline constexpr int kDefaultTGridSize = 33;
// Fixed seed used by everything that needs reproducible randomness.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

struct ScalarField {
    ManifoldSpec manifold;
    std::function<double(const Point&)> eval;
    std::string name;
};

// The sample at which convexity failed; gap < 0 is the certified amount by
// which f(gamma(t)) exceeds the chord.
struct ConvexityWitness {
    Point p;
    Point q;
    double t;
    double gap;
};

struct ConvexityReport {
    enum class Verdict { consistent, violated };

    Verdict verdict = Verdict::consistent;
    std::optional<ConvexityWitness> witness;
    long samples = 0;                  // (p,q,t) evaluations performed
    double min_second_difference = 0.0;
    std::uint64_t seed = 0;            // searches only
    int t_grid_size = kDefaultTGridSize;
};

// f was non-finite along the geodesic at parameter t.
struct EvaluationError : Error {
    EvaluationError(const std::string& what, double t_at) : Error(what), t(t_at) {}
    double t;
};

std::vector<double> default_t_grid(int count = kDefaultTGridSize);

// Checks f(gamma(t)) <= (1-t) f(p) + t f(q) + tol on the closed-form geodesic.
//
// All testers assume the sampled region is totally convex under the built-in
// metric (true for the three supported manifolds as a whole); they do not
// verify this for restricted domains.
ConvexityReport midpoint_test(const ScalarField& f, const Point& p, const Point& q,
                              const std::vector<double>& t_grid);

struct FirstOrderResult {
    double lhs; // f(p) + derivative of f along the geodesic at p
    double rhs; // f(q)
    bool ok;
};

FirstOrderResult first_order_test(const ScalarField& f, const Point& p, const Point& q);

// Minimum second difference of f along the geodesic over the interior grid.
double second_order_test(const ScalarField& f, const Point& p, const Point& q,
                         const std::vector<double>& t_grid);

// Seeded source of point pairs for the violation search.
struct PairSampler {
    std::function<std::pair<Point, Point>(std::mt19937_64&)> draw;
};

PairSampler default_pair_sampler(const ManifoldSpec& m);
Point sample_point(const ManifoldSpec& m, std::mt19937_64& rng);

// Midpoint-violation search over this metric's geodesics. A `violated`
// verdict is a certificate (exact re-evaluation at the witness);
// `consistent` is only evidence.
ConvexityReport violation_search(const ScalarField& f, const PairSampler& sampler, int trials,
                                 std::uint64_t seed = kDefaultSeed,
                                 int t_grid_size = kDefaultTGridSize);

// Named example functions exposed through the CLI.
ScalarField builtin_field(const std::string& name, const ManifoldSpec& m);
std::vector<std::string> builtin_field_names(ManifoldKind kind);

// The built-in geodesically convex family on m (used by the invariant suite).
std::vector<ScalarField> g_convex_suite(const ManifoldSpec& m);

} // namespace gct
