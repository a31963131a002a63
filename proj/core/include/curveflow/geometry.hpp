#pragma once

#include <Eigen/Dense>

namespace curveflow {

using Vec2 = Eigen::Vector2d;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// rotation by pi/2
inline Vec2 rot90(const Vec2& a) { return Vec2(-a.y(), a.x()); }

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Closed polygon, vertices in counterclockwise order. Edge i joins vertex i-1
// (cyclically) to vertex i, so edge 0 runs from the last vertex to the first.
class PolygonalCurve {
public:
    explicit PolygonalCurve(Points vertices);

    int size() const { return static_cast<int>(pts_.rows()); }
    const Points& vertices() const { return pts_; }
    // periodic indexing: accepts any integer, reduced mod N
    Vec2 vertex(int i) const;
    bool is_counterclockwise() const { return true; }

private:
    Points pts_;
};

struct EdgeFrame {
    Eigen::VectorXd r;      // edge lengths
    Points t;               // unit tangent per edge
    Points n;               // unit outward normal per edge, n = -J t
    Eigen::VectorXd theta;  // tangent angles, continuous branch from edge 0
    Eigen::VectorXd phi;    // turning angle at vertex i, between edges i and i+1
    Eigen::VectorXd kappa;  // discrete curvature per edge
    int size() const { return static_cast<int>(r.size()); }
};

struct VertexFrame {
    Eigen::VectorXd phi;
    Points T;  // unit tangent per vertex
    Points N;  // unit outward normal per vertex, N = -J T
    int size() const { return static_cast<int>(phi.size()); }
};

// signed shoelace area; positive for counterclockwise input
double polygon_area(const Points& X);
double polygon_length(const Points& X);
Eigen::VectorXd edge_lengths(const Points& X);

double length(const PolygonalCurve& curve);
double enclosed_area(const PolygonalCurve& curve);

EdgeFrame edge_frame(const Points& X);
EdgeFrame edge_frame(const PolygonalCurve& curve);

VertexFrame vertex_frame(const EdgeFrame& edges);
VertexFrame vertex_frame(const PolygonalCurve& curve, const EdgeFrame& edges);

// O(N^2) segment intersection diagnostic; not called by the stepping core
bool is_simple(const Points& X);

}  // namespace curveflow
