#pragma once

#include <functional>

#include "gct/matfun.hpp"

namespace gct {

// Geodesic gradient descent on the SPD cone under the affine-invariant
// metric, shared by the Brascamp-Lieb and operator-capacity solvers.
//
// Update: X <- X^{1/2} exp(-eta G) X^{1/2} with G = X^{1/2} grad_f(X) X^{1/2},
// Armijo backtracking on f, step reset to `step0` each iteration.
struct DescentOptions {
    double step0 = 1.0;
    double backtrack_factor = 0.5;
    double armijo_slope = 1e-4;
    int max_backtracks = 60;
    double grad_tol = 1e-8;
    int max_iter = 10000;
    // Divergence floor: objective below this with a live gradient means the
    // infimum looks unattained.
    double divergence_floor = -50.0;
};

enum class DescentStatus {
    Converged,           // Riemannian gradient norm <= grad_tol
    MaxIterations,
    NumericalFloor,      // objective flat to rounding along the search ray;
                         // gradient may sit above grad_tol
    DivergenceSuspected  // objective fell through the floor
};

struct DescentResult {
    SpdMatrix x;
    double value;
    double gradient_norm; // ||X^{1/2} grad X^{1/2}||_F at the final iterate
    int iterations;
    DescentStatus status;
};

// Line search could make no progress; carries the best iterate seen.
struct StagnationError : Error {
    StagnationError(const std::string& what, SpdMatrix best_x, double best_value)
        : Error(what), best(std::move(best_x)), value(best_value) {}
    SpdMatrix best;
    double value;
};

using SpdObjective = std::function<double(const SpdMatrix&)>;
using SpdGradient = std::function<SymMatrix(const SpdMatrix&)>; // Euclidean gradient

DescentResult geodesic_descent(const SpdObjective& f, const SpdGradient& grad,
                               const SpdMatrix& x0, const DescentOptions& opts = {});

} // namespace gct
