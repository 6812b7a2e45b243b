#include "gct/spd_descent.hpp"

#include <cmath>
#include <limits>

namespace gct {

namespace {

struct GradInfo {
    Eigen::MatrixXd half; // X^{1/2}
    SymMatrix riem;       // X^{1/2} grad_f(X) X^{1/2}
    double norm;
};

GradInfo riemannian_gradient(const SpdGradient& grad, const SpdMatrix& x) {
    GradInfo info{spd_power(x, 0.5).mat(), SymMatrix::Identity(x.order()), 0.0};
    info.riem = SymMatrix(info.half * grad(x).mat() * info.half);
    info.norm = info.riem.mat().norm();
    return info;
}

} // namespace

DescentResult geodesic_descent(const SpdObjective& f, const SpdGradient& grad,
                               const SpdMatrix& x0, const DescentOptions& opts) {
    SpdMatrix x = x0;
    double fx = f(x);
    GradInfo g = riemannian_gradient(grad, x);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (g.norm <= opts.grad_tol) {
            return {x, fx, g.norm, iter, DescentStatus::Converged};
        }
        if (fx < opts.divergence_floor) {
            return {x, fx, g.norm, iter, DescentStatus::DivergenceSuspected};
        }

        // Near the optimum the Armijo decrease falls below the rounding
        // resolution of f; there a step is accepted when it contracts the
        // gradient instead.
        const double rounding_slack = 1e-13 * (1.0 + std::abs(fx));

        bool accepted = false;
        double min_delta = std::numeric_limits<double>::infinity();
        double eta = opts.step0;
        for (int bt = 0; bt < opts.max_backtracks && !accepted;
             ++bt, eta *= opts.backtrack_factor) {
            // A step long enough to break positive definiteness counts as a
            // rejected step.
            try {
                SpdMatrix candidate = [&] {
                    const Eigen::MatrixXd step = sym_exp(SymMatrix(-eta * g.riem.mat())).mat();
                    return SpdMatrix(g.half * step * g.half);
                }();
                const double fc = f(candidate);
                min_delta = std::min(min_delta, fc - fx);
                if (fc <= fx - opts.armijo_slope * eta * g.norm * g.norm) {
                    x = candidate;
                    fx = fc;
                    g = riemannian_gradient(grad, x);
                    accepted = true;
                } else if (fc <= fx + rounding_slack) {
                    const GradInfo gc = riemannian_gradient(grad, candidate);
                    if (gc.norm <= 0.999 * g.norm) {
                        x = candidate;
                        fx = fc;
                        g = gc;
                        accepted = true;
                    }
                }
            } catch (const ConditioningError&) {
                continue;
            }
        }
        if (!accepted) {
            // Flat to machine rounding in every tried step: the iterate is at
            // the objective's numerical floor. Anything else is a stall.
            if (min_delta <= rounding_slack) {
                return {x, fx, g.norm, iter, DescentStatus::NumericalFloor};
            }
            throw StagnationError("geodesic_descent: line search stalled", x, fx);
        }
    }
    return {x, fx, g.norm, opts.max_iter, DescentStatus::MaxIterations};
}

} // namespace gct
