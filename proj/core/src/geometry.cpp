#include "curveflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace curveflow {

namespace {

int wrap_index(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

}  // namespace

PolygonalCurve::PolygonalCurve(Points vertices) : pts_(std::move(vertices)) {
    const int n = static_cast<int>(pts_.rows());
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (!pts_.allFinite()) throw std::invalid_argument("non-finite vertex coordinates");
    for (int i = 0; i < n; ++i) {
        const Vec2 d = pts_.row(i) - pts_.row(wrap_index(i - 1, n));
        if (!(d.norm() > 0.0)) throw std::invalid_argument("degenerate edge " + std::to_string(i + 1));
    }
    if (!(polygon_area(pts_) > 0.0)) throw std::invalid_argument("clockwise orientation rejected");
}

Vec2 PolygonalCurve::vertex(int i) const { return pts_.row(wrap_index(i, size())); }

double polygon_area(const Points& X) {
    const int n = static_cast<int>(X.rows());
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
        const int p = wrap_index(i - 1, n);
        a += X(p, 0) * X(i, 1) - X(p, 1) * X(i, 0);
    }
    return 0.5 * a;
}

Eigen::VectorXd edge_lengths(const Points& X) {
    const int n = static_cast<int>(X.rows());
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = X.row(i) - X.row(wrap_index(i - 1, n));
        r(i) = d.norm();
    }
    return r;
}

double polygon_length(const Points& X) { return edge_lengths(X).sum(); }

double length(const PolygonalCurve& curve) { return polygon_length(curve.vertices()); }

double enclosed_area(const PolygonalCurve& curve) { return polygon_area(curve.vertices()); }

EdgeFrame edge_frame(const Points& X) {
    const int n = static_cast<int>(X.rows());
    EdgeFrame f;
    f.r.resize(n);
    f.t.resize(n, 2);
    f.n.resize(n, 2);
    f.theta.resize(n);
    f.phi.resize(n);
    f.kappa.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = X.row(i) - X.row(wrap_index(i - 1, n));
        f.r(i) = d.norm();
        if (!(f.r(i) > 0.0)) throw std::runtime_error("degenerate edge " + std::to_string(i + 1));
        const Vec2 t = d / f.r(i);
        f.t.row(i) = t;
        f.n.row(i) = Vec2(t.y(), -t.x());  // -J t
    }
    constexpr double pi = std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        const Vec2 a = f.t.row(i);
        const Vec2 b = f.t.row(wrap_index(i + 1, n));
        f.phi(i) = std::atan2(cross2(a, b), a.dot(b));
        if (!(std::abs(f.phi(i)) < pi - 1e-12))
            throw std::runtime_error("angle overflow at vertex " + std::to_string(i + 1));
    }
    f.theta(0) = std::atan2(f.t(0, 1), f.t(0, 0));
    for (int i = 0; i + 1 < n; ++i) f.theta(i + 1) = f.theta(i) + f.phi(i);
    for (int i = 0; i < n; ++i) {
        const int p = wrap_index(i - 1, n);
        f.kappa(i) = (std::tan(0.5 * f.phi(i)) + std::tan(0.5 * f.phi(p))) / f.r(i);
    }
    return f;
}

EdgeFrame edge_frame(const PolygonalCurve& curve) { return edge_frame(curve.vertices()); }

VertexFrame vertex_frame(const EdgeFrame& edges) {
    const int n = edges.size();
    constexpr double pi = std::numbers::pi;
    VertexFrame v;
    v.phi = edges.phi;
    v.T.resize(n, 2);
    v.N.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        if (!(pi - std::abs(v.phi(i)) > 1e-12))
            throw std::runtime_error("cusp at vertex " + std::to_string(i + 1));
        const double a = edges.theta(i) + 0.5 * v.phi(i);
        v.T.row(i) = Vec2(std::cos(a), std::sin(a));
        v.N.row(i) = Vec2(std::sin(a), -std::cos(a));  // -J T
    }
    return v;
}

VertexFrame vertex_frame(const PolygonalCurve&, const EdgeFrame& edges) { return vertex_frame(edges); }

namespace {

// proper or endpoint-touching intersection of segments [a,b] and [c,d]
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    auto on = [](const Vec2& p, const Vec2& q, const Vec2& x) {
        return cross2(q - p, x - p) == 0.0 && (x - p).dot(x - q) <= 0.0;
    };
    return (d1 == 0.0 && on(a, b, c)) || (d2 == 0.0 && on(a, b, d)) ||
           (d3 == 0.0 && on(c, d, a)) || (d4 == 0.0 && on(c, d, b));
}

}  // namespace

bool is_simple(const Points& X) {
    const int n = static_cast<int>(X.rows());
    for (int i = 0; i < n; ++i) {
        const Vec2 a = X.row(i);
        const Vec2 b = X.row(wrap_index(i + 1, n));
        for (int j = i + 1; j < n; ++j) {
            if (j == i || wrap_index(j + 1, n) == i || j == wrap_index(i + 1, n)) continue;
            const Vec2 c = X.row(j);
            const Vec2 d = X.row(wrap_index(j + 1, n));
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

}  // namespace curveflow
