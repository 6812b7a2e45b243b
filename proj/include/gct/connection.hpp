#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gct/manifold.hpp"

namespace gct {

// Metric tensor in a fixed coordinate frame: coords -> G(p) with
// G_ij = g(d_i, d_j), symmetric positive definite wherever queried.
struct MetricFrame {
    int dim;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
};

// Gamma^k_ij at a point, symmetric in (i,j).
class ChristoffelTensor {
public:
    explicit ChristoffelTensor(int dim);

    int dim() const { return dim_; }
    double operator()(int k, int i, int j) const { return gamma_[index(k, i, j)]; }
    void set(int k, int i, int j, double value);

    // Averages (i,j)/(j,i) so torsion symmetry holds exactly; returns the
    // largest asymmetry found before enforcement.
    double enforce_torsion_symmetry();

    // Asymmetry measured by the last enforce_torsion_symmetry call.
    double symmetry_defect() const { return sym_defect_; }

private:
    size_t index(int k, int i, int j) const;

    int dim_;
    std::vector<double> gamma_;
    double sym_defect_ = 0.0;
};

// Discretized curve in frame coordinates.
struct CurveTrace {
    std::vector<double> times;                 // strictly increasing
    std::vector<Eigen::VectorXd> points;
    std::vector<Eigen::VectorXd> velocities;

    size_t size() const { return times.size(); }
};

// Integration left the manifold's valid region; carries the trace up to the
// last valid state.
struct IntegrationError : Error {
    IntegrationError(const std::string& what, CurveTrace trace)
        : Error(what), partial(std::move(trace)) {}
    CurveTrace partial;
};

using ChristoffelSource = std::function<ChristoffelTensor(const Eigen::VectorXd&)>;
using ValidityGuard = std::function<bool(const Eigen::VectorXd&)>;

// Finite-difference step for metric derivatives: h = 1e-4 * max(1, |p|_inf).
double default_fd_step(const Eigen::VectorXd& p);

MetricFrame metric_frame_of(const ManifoldSpec& m);

// Levi-Civita Christoffel symbols from the metric via central differences:
// Gamma^k_ij = 1/2 sum_l g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
// h <= 0 selects the default step.
ChristoffelTensor christoffel_numeric(const MetricFrame& frame, const Eigen::VectorXd& p,
                                      double h = 0.0);

// Closed forms: all zeros on R^n, Gamma^i_ii = -1/p_i on the orthant.
// The SPD cone has no closed form here and raises UsageError.
ChristoffelTensor christoffel_closed(const ManifoldSpec& m, const Point& p);

// Per-manifold Christoffel source in frame coordinates (closed form where
// available, numeric on the SPD cone).
ChristoffelSource christoffel_source_of(const ManifoldSpec& m);

// Validity predicate used to guard ODE integration on m.
ValidityGuard validity_guard_of(const ManifoldSpec& m);

// Covariant derivative of the field X sampled along the trace:
// (D X)^k = Xdot^k + sum_ij gammadot_i X^j Gamma^k_ij,
// with Xdot by finite differences on the trace times.
std::vector<Eigen::VectorXd> covariant_derivative_along(const CurveTrace& trace,
                                                        const std::vector<Eigen::VectorXd>& field,
                                                        const ChristoffelSource& gamma_at);

// Fixed-step classical Runge-Kutta on the first-order system (gamma, gammadot)
// with gammaddot_k = -sum_ij gammadot_i gammadot_j Gamma^k_ij.
CurveTrace geodesic_ode_solve(const ChristoffelSource& gamma_at, const Eigen::VectorXd& p0,
                              const Eigen::VectorXd& v0, double duration, int steps,
                              const ValidityGuard& valid = {});

// Max over interior samples of the frame norm of the covariant self-derivative.
double geodesic_residual(const CurveTrace& trace, const ChristoffelSource& gamma_at);

// Composite trapezoid quadrature of sqrt(g(gammadot,gammadot)) resp.
// g(gammadot,gammadot) along the trace.
double curve_length(const ManifoldSpec& m, const CurveTrace& trace);
double curve_energy(const ManifoldSpec& m, const CurveTrace& trace);

// Smooth vector field along a curve, given with its time derivative so the
// variation energies carry quadrature error only.
struct VariationField {
    std::function<Eigen::VectorXd(double)> value;
    std::function<Eigen::VectorXd(double)> velocity;
};

// sin(k pi (t - t0)/(t1 - t0)) * direction; vanishes at both endpoints.
VariationField sine_bump_field(double t0, double t1, int k, const Eigen::VectorXd& direction);

struct VariationSample {
    double u;
    double energy;
    bool valid; // false when the perturbed curve left the manifold
};

// Energies of nu_u(t) = trace(t) + u * perturbation(t) over the u grid.
// The perturbation must vanish at both endpoints.
std::vector<VariationSample> variation_energy_test(const ManifoldSpec& m, const CurveTrace& trace,
                                                   const VariationField& perturbation,
                                                   const std::vector<double>& u_grid);

// Sample the closed-form geodesic joining p to q at `samples` uniform times in
// [0,1], with exact velocities, in frame coordinates.
CurveTrace sample_closed_form_geodesic(const Point& p, const Point& q, int samples);

} // namespace gct
