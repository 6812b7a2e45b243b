#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "gct/matfun.hpp"

namespace gct {

enum class ManifoldKind {
    Euclidean,      // R^n, g_p(u,v) = <u,v>
    PositiveOrthant, // R^n_{>0}, g_p(u,v) = <P^{-1}u, P^{-1}v>
    SpdCone,        // S^n_{++}, g_P(U,V) = tr[P^{-1} U P^{-1} V]
};

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

struct ManifoldSpec {
    ManifoldKind kind;
    int n; // vector length for Euclidean/orthant, matrix order for SpdCone

    // Intrinsic dimension: n for the vector manifolds, n(n+1)/2 for SpdCone.
    int dim() const { return kind == ManifoldKind::SpdCone ? sym_dim(n) : n; }

    bool operator==(const ManifoldSpec& other) const = default;
};

// A point of one of the three manifolds. Vector manifolds hold coordinates,
// the SPD cone holds the matrix itself.
class Point {
public:
    Point(const ManifoldSpec& m, const Eigen::VectorXd& coords);
    Point(const ManifoldSpec& m, const SpdMatrix& p);

    const ManifoldSpec& manifold() const { return m_; }
    const Eigen::VectorXd& vec() const;
    const SpdMatrix& mat() const;

private:
    ManifoldSpec m_;
    std::variant<Eigen::VectorXd, SpdMatrix> value_;
};

// A tangent vector anchored at a base point. SpdCone tangents are symmetric
// matrices; the vector manifolds use plain coordinate vectors.
class Tangent {
public:
    Tangent(const Point& base, const Eigen::VectorXd& v);
    Tangent(const Point& base, const SymMatrix& v);

    const ManifoldSpec& manifold() const { return base_.manifold(); }
    const Point& base() const { return base_; }
    const Eigen::VectorXd& vec() const;
    const SymMatrix& mat() const;

private:
    Point base_;
    std::variant<Eigen::VectorXd, SymMatrix> value_;
};

double metric_inner(const Point& p, const Tangent& u, const Tangent& v);

// gamma(t) on the unique closed-form geodesic with gamma(0)=p, gamma(1)=q.
// t may lie outside [0,1]; positivity constraints still apply.
Point geodesic_point(const Point& p, const Point& q, double t);

Point exp_map(const Point& p, const Tangent& v, double t);
Tangent log_map(const Point& p, const Point& q);

double distance(const Point& p, const Point& q);

// Frame-coordinate view used by the connection machinery: identity for the
// vector manifolds, the row-major (i<=j) flattening for the SPD cone.
Eigen::VectorXd point_to_frame(const Point& p);
Point point_from_frame(const ManifoldSpec& m, const Eigen::VectorXd& coords);
Eigen::VectorXd tangent_to_frame(const Tangent& v);
Tangent tangent_from_frame(const Point& base, const Eigen::VectorXd& coords);

// True when the frame coordinates describe a valid manifold point (strict
// positivity for the orthant, positive definiteness for the cone).
bool frame_coords_valid(const ManifoldSpec& m, const Eigen::VectorXd& coords);

} // namespace gct
