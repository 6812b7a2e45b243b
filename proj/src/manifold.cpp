#include "gct/manifold.hpp"

#include <cmath>

namespace gct {

namespace {

void require_same_manifold(const ManifoldSpec& a, const ManifoldSpec& b, const char* where) {
    if (!(a == b)) throw UsageError(std::string(where) + ": mismatched manifolds");
}

void require_same_base(const Point& p, const Tangent& v, const char* where) {
    require_same_manifold(p.manifold(), v.manifold(), where);
    const bool same = p.manifold().kind == ManifoldKind::SpdCone
                          ? p.mat().mat() == v.base().mat().mat()
                          : p.vec() == v.base().vec();
    if (!same) throw UsageError(std::string(where) + ": tangent based at a different point");
}

void check_vector_point(const ManifoldSpec& m, const Eigen::VectorXd& coords) {
    if (coords.size() != m.n) throw UsageError("Point: coordinate length does not match manifold");
    if (!coords.allFinite()) throw InputError("Point: non-finite coordinates");
    if (m.kind == ManifoldKind::PositiveOrthant && (coords.array() <= 0.0).any()) {
        throw InputError("Point: positive orthant requires strictly positive coordinates");
    }
}

// P^{-1/2} and P^{1/2} appear in every SPD-cone formula below.
struct SpdRoots {
    Eigen::MatrixXd half;
    Eigen::MatrixXd inv_half;
};

SpdRoots spd_roots(const SpdMatrix& p) {
    return SpdRoots{spd_power(p, 0.5).mat(), spd_power(p, -0.5).mat()};
}

} // namespace

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::Euclidean: return "euclidean";
        case ManifoldKind::PositiveOrthant: return "orthant";
        case ManifoldKind::SpdCone: return "spd";
    }
    throw UsageError("to_string: unknown manifold kind");
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
    if (name == "euclidean") return ManifoldKind::Euclidean;
    if (name == "orthant") return ManifoldKind::PositiveOrthant;
    if (name == "spd") return ManifoldKind::SpdCone;
    throw InputError("unknown manifold kind: " + name);
}

Point::Point(const ManifoldSpec& m, const Eigen::VectorXd& coords) : m_(m), value_(coords) {
    if (m.kind == ManifoldKind::SpdCone) {
        throw UsageError("Point: SPD cone points are matrices, not coordinate vectors");
    }
    check_vector_point(m, coords);
}

Point::Point(const ManifoldSpec& m, const SpdMatrix& p) : m_(m), value_(p) {
    if (m.kind != ManifoldKind::SpdCone) {
        throw UsageError("Point: matrix points only exist on the SPD cone");
    }
    if (p.order() != m.n) throw UsageError("Point: matrix order does not match manifold");
}

const Eigen::VectorXd& Point::vec() const {
    if (!std::holds_alternative<Eigen::VectorXd>(value_)) {
        throw UsageError("Point::vec: point is a matrix");
    }
    return std::get<Eigen::VectorXd>(value_);
}

const SpdMatrix& Point::mat() const {
    if (!std::holds_alternative<SpdMatrix>(value_)) {
        throw UsageError("Point::mat: point is a coordinate vector");
    }
    return std::get<SpdMatrix>(value_);
}

Tangent::Tangent(const Point& base, const Eigen::VectorXd& v) : base_(base), value_(v) {
    if (base.manifold().kind == ManifoldKind::SpdCone) {
        throw UsageError("Tangent: SPD cone tangents are symmetric matrices");
    }
    if (v.size() != base.manifold().n) throw UsageError("Tangent: length does not match manifold");
    if (!v.allFinite()) throw InputError("Tangent: non-finite entries");
}

Tangent::Tangent(const Point& base, const SymMatrix& v) : base_(base), value_(v) {
    if (base.manifold().kind != ManifoldKind::SpdCone) {
        throw UsageError("Tangent: matrix tangents only exist on the SPD cone");
    }
    if (v.order() != base.manifold().n) throw UsageError("Tangent: order does not match manifold");
}

const Eigen::VectorXd& Tangent::vec() const {
    if (!std::holds_alternative<Eigen::VectorXd>(value_)) {
        throw UsageError("Tangent::vec: tangent is a matrix");
    }
    return std::get<Eigen::VectorXd>(value_);
}

const SymMatrix& Tangent::mat() const {
    if (!std::holds_alternative<SymMatrix>(value_)) {
        throw UsageError("Tangent::mat: tangent is a coordinate vector");
    }
    return std::get<SymMatrix>(value_);
}

double metric_inner(const Point& p, const Tangent& u, const Tangent& v) {
    require_same_base(p, u, "metric_inner");
    require_same_base(p, v, "metric_inner");
    switch (p.manifold().kind) {
        case ManifoldKind::Euclidean:
            return u.vec().dot(v.vec());
        case ManifoldKind::PositiveOrthant: {
            const Eigen::ArrayXd inv = p.vec().array().inverse();
            return ((u.vec().array() * inv) * (v.vec().array() * inv)).sum();
        }
        case ManifoldKind::SpdCone: {
            const Eigen::MatrixXd pinv = spd_power(p.mat(), -1.0).mat();
            return (pinv * u.mat().mat() * pinv * v.mat().mat()).trace();
        }
    }
    throw UsageError("metric_inner: unknown manifold kind");
}

Point geodesic_point(const Point& p, const Point& q, double t) {
    require_same_manifold(p.manifold(), q.manifold(), "geodesic_point");
    switch (p.manifold().kind) {
        case ManifoldKind::Euclidean:
            return Point(p.manifold(), ((1.0 - t) * p.vec() + t * q.vec()).eval());
        case ManifoldKind::PositiveOrthant: {
            // gamma_i(t) = p_i (q_i / p_i)^t, evaluated in log space.
            const Eigen::ArrayXd lp = p.vec().array().log();
            const Eigen::ArrayXd lq = q.vec().array().log();
            return Point(p.manifold(), (((1.0 - t) * lp + t * lq).exp()).matrix().eval());
        }
        case ManifoldKind::SpdCone: {
            const SpdRoots r = spd_roots(p.mat());
            const SpdMatrix inner(r.inv_half * q.mat().mat() * r.inv_half);
            const Eigen::MatrixXd powed = spd_power(inner, t).mat();
            return Point(p.manifold(), SpdMatrix(r.half * powed * r.half));
        }
    }
    throw UsageError("geodesic_point: unknown manifold kind");
}

Point exp_map(const Point& p, const Tangent& v, double t) {
    require_same_base(p, v, "exp_map");
    switch (p.manifold().kind) {
        case ManifoldKind::Euclidean:
            return Point(p.manifold(), (p.vec() + t * v.vec()).eval());
        case ManifoldKind::PositiveOrthant: {
            // Coordinatewise p_i exp(t v_i / p_i).
            const Eigen::ArrayXd rate = v.vec().array() / p.vec().array();
            return Point(p.manifold(), (p.vec().array() * (t * rate).exp()).matrix().eval());
        }
        case ManifoldKind::SpdCone: {
            const SpdRoots r = spd_roots(p.mat());
            const SymMatrix s(r.inv_half * v.mat().mat() * r.inv_half);
            const Eigen::MatrixXd e = sym_exp(SymMatrix(t * s.mat())).mat();
            return Point(p.manifold(), SpdMatrix(r.half * e * r.half));
        }
    }
    throw UsageError("exp_map: unknown manifold kind");
}

Tangent log_map(const Point& p, const Point& q) {
    require_same_manifold(p.manifold(), q.manifold(), "log_map");
    switch (p.manifold().kind) {
        case ManifoldKind::Euclidean:
            return Tangent(p, (q.vec() - p.vec()).eval());
        case ManifoldKind::PositiveOrthant: {
            const Eigen::ArrayXd ratio = q.vec().array() / p.vec().array();
            return Tangent(p, (p.vec().array() * ratio.log()).matrix().eval());
        }
        case ManifoldKind::SpdCone: {
            const SpdRoots r = spd_roots(p.mat());
            const SpdMatrix inner(r.inv_half * q.mat().mat() * r.inv_half);
            const Eigen::MatrixXd s = spd_log(inner).mat();
            return Tangent(p, SymMatrix(r.half * s * r.half));
        }
    }
    throw UsageError("log_map: unknown manifold kind");
}

double distance(const Point& p, const Point& q) {
    require_same_manifold(p.manifold(), q.manifold(), "distance");
    switch (p.manifold().kind) {
        case ManifoldKind::Euclidean:
            return (p.vec() - q.vec()).norm();
        case ManifoldKind::PositiveOrthant:
            return (q.vec().array().log() - p.vec().array().log()).matrix().norm();
        case ManifoldKind::SpdCone: {
            const SpdRoots r = spd_roots(p.mat());
            const SpdMatrix inner(r.inv_half * q.mat().mat() * r.inv_half);
            return spd_log(inner).mat().norm();
        }
    }
    throw UsageError("distance: unknown manifold kind");
}

Eigen::VectorXd point_to_frame(const Point& p) {
    if (p.manifold().kind == ManifoldKind::SpdCone) return sym_flatten(p.mat().sym());
    return p.vec();
}

Point point_from_frame(const ManifoldSpec& m, const Eigen::VectorXd& coords) {
    if (m.kind == ManifoldKind::SpdCone) {
        return Point(m, SpdMatrix(sym_unflatten(m.n, coords)));
    }
    return Point(m, coords);
}

Eigen::VectorXd tangent_to_frame(const Tangent& v) {
    if (v.manifold().kind == ManifoldKind::SpdCone) return sym_flatten(v.mat());
    return v.vec();
}

Tangent tangent_from_frame(const Point& base, const Eigen::VectorXd& coords) {
    if (base.manifold().kind == ManifoldKind::SpdCone) {
        return Tangent(base, sym_unflatten(base.manifold().n, coords));
    }
    return Tangent(base, coords);
}

bool frame_coords_valid(const ManifoldSpec& m, const Eigen::VectorXd& coords) {
    if (coords.size() != m.dim() || !coords.allFinite()) return false;
    switch (m.kind) {
        case ManifoldKind::Euclidean:
            return true;
        case ManifoldKind::PositiveOrthant:
            return (coords.array() > 0.0).all();
        case ManifoldKind::SpdCone: {
            const SymMatrix s = sym_unflatten(m.n, coords);
            Eigen::LLT<Eigen::MatrixXd> llt(s.mat());
            return llt.info() == Eigen::Success;
        }
    }
    return false;
}

} // namespace gct
