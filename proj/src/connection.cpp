#include "gct/connection.hpp"

#include <cmath>
#include <limits>

namespace gct {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
    return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd spd_inverse_or_throw(const Eigen::MatrixXd& p, const char* where) {
    Eigen::LLT<Eigen::MatrixXd> llt(p);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError(std::string(where) + ": matrix is not positive definite");
    }
    return llt.solve(Eigen::MatrixXd::Identity(p.rows(), p.cols()));
}

} // namespace

ChristoffelTensor::ChristoffelTensor(int dim) : dim_(dim) {
    if (dim < 1) throw UsageError("ChristoffelTensor: dimension must be positive");
    gamma_.assign(static_cast<size_t>(dim) * dim * dim, 0.0);
}

size_t ChristoffelTensor::index(int k, int i, int j) const {
    if (k < 0 || k >= dim_ || i < 0 || i >= dim_ || j < 0 || j >= dim_) {
        throw UsageError("ChristoffelTensor: index out of range");
    }
    return (static_cast<size_t>(k) * dim_ + i) * dim_ + j;
}

void ChristoffelTensor::set(int k, int i, int j, double value) {
    gamma_[index(k, i, j)] = value;
}

double ChristoffelTensor::enforce_torsion_symmetry() {
    double worst = 0.0;
    for (int k = 0; k < dim_; ++k) {
        for (int i = 0; i < dim_; ++i) {
            for (int j = i + 1; j < dim_; ++j) {
                const double a = (*this)(k, i, j);
                const double b = (*this)(k, j, i);
                worst = std::max(worst, std::abs(a - b));
                const double mean = 0.5 * (a + b);
                set(k, i, j, mean);
                set(k, j, i, mean);
            }
        }
    }
    sym_defect_ = worst;
    return worst;
}

double default_fd_step(const Eigen::VectorXd& p) {
    return 1e-4 * std::max(1.0, p.lpNorm<Eigen::Infinity>());
}

MetricFrame metric_frame_of(const ManifoldSpec& m) {
    const int d = m.dim();
    switch (m.kind) {
        case ManifoldKind::Euclidean:
            return {d, [d](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(d, d).eval(); }};
        case ManifoldKind::PositiveOrthant:
            return {d, [](const Eigen::VectorXd& p) {
                        return Eigen::MatrixXd(p.array().square().inverse().matrix().asDiagonal());
                    }};
        case ManifoldKind::SpdCone: {
            const int n = m.n;
            auto basis = sym_basis(n);
            return {d, [n, d, basis](const Eigen::VectorXd& coords) {
                        const SymMatrix p = sym_unflatten(n, coords);
                        const Eigen::MatrixXd pinv = spd_inverse_or_throw(p.mat(), "metric_frame_of");
                        Eigen::MatrixXd g(d, d);
                        for (int a = 0; a < d; ++a) {
                            // tr[P^-1 E_a P^-1 E_b] read off the matrix P^-1 E_a P^-1.
                            const Eigen::MatrixXd w = pinv * basis[a].matrix.mat() * pinv;
                            for (int b = 0; b < d; ++b) {
                                const int k = basis[b].i;
                                const int l = basis[b].j;
                                g(a, b) = (k == l) ? w(k, k) : w(k, l) + w(l, k);
                            }
                        }
                        return symmetrized(g).eval();
                    }};
        }
    }
    throw UsageError("metric_frame_of: unknown manifold kind");
}

ChristoffelTensor christoffel_numeric(const MetricFrame& frame, const Eigen::VectorXd& p, double h) {
    const int d = frame.dim;
    if (p.size() != d) throw UsageError("christoffel_numeric: coordinate length mismatch");
    if (h <= 0.0) h = default_fd_step(p);

    const Eigen::MatrixXd g0 = frame.eval(p);
    std::vector<Eigen::MatrixXd> dg(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
        Eigen::VectorXd fwd = p, bwd = p;
        fwd(a) += h;
        bwd(a) -= h;
        dg[a] = (frame.eval(fwd) - frame.eval(bwd)) / (2.0 * h);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(g0);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError("christoffel_numeric: metric matrix is not positive definite");
    }

    ChristoffelTensor gamma(d);
    Eigen::VectorXd rhs(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            for (int l = 0; l < d; ++l) {
                rhs(l) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            }
            const Eigen::VectorXd gk = llt.solve(rhs);
            for (int k = 0; k < d; ++k) {
                gamma.set(k, i, j, gk(k));
                gamma.set(k, j, i, gk(k));
            }
        }
    }
    gamma.enforce_torsion_symmetry();
    return gamma;
}

ChristoffelTensor christoffel_closed(const ManifoldSpec& m, const Point& p) {
    switch (m.kind) {
        case ManifoldKind::Euclidean:
            return ChristoffelTensor(m.dim());
        case ManifoldKind::PositiveOrthant: {
            ChristoffelTensor gamma(m.dim());
            for (int i = 0; i < m.dim(); ++i) gamma.set(i, i, i, -1.0 / p.vec()(i));
            return gamma;
        }
        case ManifoldKind::SpdCone:
            throw UsageError("christoffel_closed: SPD cone uses christoffel_numeric");
    }
    throw UsageError("christoffel_closed: unknown manifold kind");
}

ChristoffelSource christoffel_source_of(const ManifoldSpec& m) {
    switch (m.kind) {
        case ManifoldKind::Euclidean:
            return [d = m.dim()](const Eigen::VectorXd&) { return ChristoffelTensor(d); };
        case ManifoldKind::PositiveOrthant:
            return [d = m.dim()](const Eigen::VectorXd& coords) {
                ChristoffelTensor gamma(d);
                for (int i = 0; i < d; ++i) gamma.set(i, i, i, -1.0 / coords(i));
                return gamma;
            };
        case ManifoldKind::SpdCone: {
            // Trajectory integration accumulates the Christoffel error over
            // hundreds of evaluations, so this source runs the central
            // differences at a tighter step than the standalone default.
            MetricFrame frame = metric_frame_of(m);
            return [frame](const Eigen::VectorXd& coords) {
                const double h = 1e-5 * std::max(1.0, coords.lpNorm<Eigen::Infinity>());
                return christoffel_numeric(frame, coords, h);
            };
        }
    }
    throw UsageError("christoffel_source_of: unknown manifold kind");
}

ValidityGuard validity_guard_of(const ManifoldSpec& m) {
    switch (m.kind) {
        case ManifoldKind::Euclidean:
            return [](const Eigen::VectorXd& x) { return x.allFinite(); };
        case ManifoldKind::PositiveOrthant:
            // Abort before coordinates underflow to the boundary.
            return [](const Eigen::VectorXd& x) {
                return x.allFinite() && (x.array() > 1e-12).all();
            };
        case ManifoldKind::SpdCone:
            return [m](const Eigen::VectorXd& x) { return frame_coords_valid(m, x); };
    }
    throw UsageError("validity_guard_of: unknown manifold kind");
}

std::vector<Eigen::VectorXd> covariant_derivative_along(const CurveTrace& trace,
                                                        const std::vector<Eigen::VectorXd>& field,
                                                        const ChristoffelSource& gamma_at) {
    const size_t n = trace.size();
    if (n < 3) throw UsageError("covariant_derivative_along: need at least 3 samples");
    if (trace.points.size() != n || trace.velocities.size() != n || field.size() != n) {
        throw UsageError("covariant_derivative_along: sample count mismatch");
    }
    const int d = static_cast<int>(trace.points[0].size());

    std::vector<Eigen::VectorXd> out(n);
    for (size_t s = 0; s < n; ++s) {
        Eigen::VectorXd xdot(d);
        if (s == 0) {
            xdot = (field[1] - field[0]) / (trace.times[1] - trace.times[0]);
        } else if (s + 1 == n) {
            xdot = (field[n - 1] - field[n - 2]) / (trace.times[n - 1] - trace.times[n - 2]);
        } else {
            xdot = (field[s + 1] - field[s - 1]) / (trace.times[s + 1] - trace.times[s - 1]);
        }
        const ChristoffelTensor gamma = gamma_at(trace.points[s]);
        Eigen::VectorXd res = xdot;
        for (int k = 0; k < d; ++k) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    acc += trace.velocities[s](i) * field[s](j) * gamma(k, i, j);
                }
            }
            res(k) += acc;
        }
        out[s] = res;
    }
    return out;
}

CurveTrace geodesic_ode_solve(const ChristoffelSource& gamma_at, const Eigen::VectorXd& p0,
                              const Eigen::VectorXd& v0, double duration, int steps,
                              const ValidityGuard& valid) {
    if (steps < 1) throw UsageError("geodesic_ode_solve: steps must be positive");
    if (p0.size() != v0.size()) throw UsageError("geodesic_ode_solve: state size mismatch");
    const int d = static_cast<int>(p0.size());
    const double dt = duration / steps;

    CurveTrace trace;
    trace.times.reserve(static_cast<size_t>(steps) + 1);
    trace.points.reserve(static_cast<size_t>(steps) + 1);
    trace.velocities.reserve(static_cast<size_t>(steps) + 1);

    auto accel = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
        if (valid && !valid(x)) {
            throw IntegrationError("geodesic_ode_solve: trajectory left the manifold", trace);
        }
        const ChristoffelTensor gamma = gamma_at(x);
        Eigen::VectorXd a(d);
        for (int k = 0; k < d; ++k) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) acc += v(i) * v(j) * gamma(k, i, j);
            }
            a(k) = -acc;
        }
        return a;
    };

    Eigen::VectorXd x = p0, v = v0;
    trace.times.push_back(0.0);
    trace.points.push_back(x);
    trace.velocities.push_back(v);

    for (int s = 0; s < steps; ++s) {
        const Eigen::VectorXd a1 = accel(x, v);
        const Eigen::VectorXd k1x = v, k1v = a1;

        const Eigen::VectorXd a2 = accel(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
        const Eigen::VectorXd k2x = v + 0.5 * dt * k1v, k2v = a2;

        const Eigen::VectorXd a3 = accel(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
        const Eigen::VectorXd k3x = v + 0.5 * dt * k2v, k3v = a3;

        const Eigen::VectorXd a4 = accel(x + dt * k3x, v + dt * k3v);
        const Eigen::VectorXd k4x = v + dt * k3v, k4v = a4;

        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        if (valid && !valid(x)) {
            throw IntegrationError("geodesic_ode_solve: trajectory left the manifold", trace);
        }
        trace.times.push_back(dt * (s + 1));
        trace.points.push_back(x);
        trace.velocities.push_back(v);
    }
    return trace;
}

double geodesic_residual(const CurveTrace& trace, const ChristoffelSource& gamma_at) {
    const auto dv = covariant_derivative_along(trace, trace.velocities, gamma_at);
    double worst = 0.0;
    for (size_t s = 1; s + 1 < dv.size(); ++s) worst = std::max(worst, dv[s].norm());
    return worst;
}

namespace {

double trapezoid_of_speed(const ManifoldSpec& m, const CurveTrace& trace, bool square) {
    if (trace.size() < 2) throw UsageError("curve quadrature: need at least 2 samples");
    const MetricFrame frame = metric_frame_of(m);
    std::vector<double> integrand(trace.size());
    for (size_t s = 0; s < trace.size(); ++s) {
        const Eigen::MatrixXd g = frame.eval(trace.points[s]);
        const double e = trace.velocities[s].dot(g * trace.velocities[s]);
        integrand[s] = square ? e : std::sqrt(std::max(e, 0.0));
    }
    double total = 0.0;
    for (size_t s = 0; s + 1 < trace.size(); ++s) {
        total += 0.5 * (integrand[s] + integrand[s + 1]) * (trace.times[s + 1] - trace.times[s]);
    }
    return total;
}

} // namespace

double curve_length(const ManifoldSpec& m, const CurveTrace& trace) {
    return trapezoid_of_speed(m, trace, false);
}

double curve_energy(const ManifoldSpec& m, const CurveTrace& trace) {
    return trapezoid_of_speed(m, trace, true);
}

VariationField sine_bump_field(double t0, double t1, int k, const Eigen::VectorXd& direction) {
    if (k < 1 || t1 <= t0) throw UsageError("sine_bump_field: bad parameters");
    const double omega = k * M_PI / (t1 - t0);
    return VariationField{
        [=](double t) { return (std::sin(omega * (t - t0)) * direction).eval(); },
        [=](double t) { return (omega * std::cos(omega * (t - t0)) * direction).eval(); },
    };
}

std::vector<VariationSample> variation_energy_test(const ManifoldSpec& m, const CurveTrace& trace,
                                                   const VariationField& perturbation,
                                                   const std::vector<double>& u_grid) {
    if (trace.size() < 3) throw UsageError("variation_energy_test: need at least 3 samples");
    const double t0 = trace.times.front();
    const double t1 = trace.times.back();
    const double end_norm =
        std::max(perturbation.value(t0).norm(), perturbation.value(t1).norm());
    if (end_norm > 1e-10) {
        throw UsageError("variation_energy_test: perturbation must vanish at the endpoints");
    }

    std::vector<Eigen::VectorXd> pval(trace.size()), pvel(trace.size());
    for (size_t s = 0; s < trace.size(); ++s) {
        pval[s] = perturbation.value(trace.times[s]);
        pvel[s] = perturbation.velocity(trace.times[s]);
    }

    std::vector<VariationSample> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) {
        CurveTrace varied;
        varied.times = trace.times;
        varied.points.resize(trace.size());
        varied.velocities.resize(trace.size());
        bool ok = true;
        for (size_t s = 0; s < trace.size(); ++s) {
            varied.points[s] = trace.points[s] + u * pval[s];
            varied.velocities[s] = trace.velocities[s] + u * pvel[s];
            if (!frame_coords_valid(m, varied.points[s])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            out.push_back({u, std::numeric_limits<double>::quiet_NaN(), false});
            continue;
        }
        out.push_back({u, curve_energy(m, varied), true});
    }
    return out;
}

CurveTrace sample_closed_form_geodesic(const Point& p, const Point& q, int samples) {
    if (samples < 2) throw UsageError("sample_closed_form_geodesic: need at least 2 samples");
    const ManifoldSpec m = p.manifold();
    CurveTrace trace;
    trace.times.resize(static_cast<size_t>(samples));
    trace.points.resize(static_cast<size_t>(samples));
    trace.velocities.resize(static_cast<size_t>(samples));
    for (int s = 0; s < samples; ++s) trace.times[static_cast<size_t>(s)] = double(s) / (samples - 1);

    switch (m.kind) {
        case ManifoldKind::Euclidean: {
            const Eigen::VectorXd dir = q.vec() - p.vec();
            for (int s = 0; s < samples; ++s) {
                const double t = trace.times[static_cast<size_t>(s)];
                trace.points[static_cast<size_t>(s)] = p.vec() + t * dir;
                trace.velocities[static_cast<size_t>(s)] = dir;
            }
            return trace;
        }
        case ManifoldKind::PositiveOrthant: {
            const Eigen::ArrayXd alpha = (q.vec().array() / p.vec().array()).log();
            for (int s = 0; s < samples; ++s) {
                const double t = trace.times[static_cast<size_t>(s)];
                const Eigen::ArrayXd x = p.vec().array() * (t * alpha).exp();
                trace.points[static_cast<size_t>(s)] = x.matrix();
                trace.velocities[static_cast<size_t>(s)] = (alpha * x).matrix();
            }
            return trace;
        }
        case ManifoldKind::SpdCone: {
            const Eigen::MatrixXd half = spd_power(p.mat(), 0.5).mat();
            const Eigen::MatrixXd inv_half = spd_power(p.mat(), -0.5).mat();
            const SymMatrix s_mat(spd_log(SpdMatrix(inv_half * q.mat().mat() * inv_half)));
            const SymEig eig = sym_eig(s_mat);
            for (int s = 0; s < samples; ++s) {
                const double t = trace.times[static_cast<size_t>(s)];
                Eigen::VectorXd e(eig.values.size()), de(eig.values.size());
                for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
                    e(k) = std::exp(t * eig.values(k));
                    de(k) = eig.values(k) * e(k);
                }
                const Eigen::MatrixXd exp_ts =
                    eig.vectors * e.asDiagonal() * eig.vectors.transpose();
                const Eigen::MatrixXd dexp_ts =
                    eig.vectors * de.asDiagonal() * eig.vectors.transpose();
                trace.points[static_cast<size_t>(s)] =
                    sym_flatten(SymMatrix(half * exp_ts * half));
                trace.velocities[static_cast<size_t>(s)] =
                    sym_flatten(SymMatrix(half * dexp_ts * half));
            }
            return trace;
        }
    }
    throw UsageError("sample_closed_form_geodesic: unknown manifold kind");
}

} // namespace gct
