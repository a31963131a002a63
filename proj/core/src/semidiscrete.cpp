#include "curveflow/semidiscrete.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace curveflow {

namespace {

int wrap_index(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

}  // namespace

Eigen::VectorXd vertex_normal_velocity(const Eigen::VectorXd& v, const VertexFrame& vertices) {
    const int n = vertices.size();
    Eigen::VectorXd V(n);
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(0.5 * vertices.phi(i));
        if (!(std::abs(c) > 1e-12)) throw std::runtime_error("cusp at vertex " + std::to_string(i + 1));
        V(i) = (v(i) + v(wrap_index(i + 1, n))) / (2.0 * c);
    }
    return V;
}

Eigen::VectorXd aud_tangential_velocity(const PolygonalCurve&, const EdgeFrame& edges,
                                        const VertexFrame& vertices, const Eigen::VectorXd& V,
                                        const Eigen::VectorXd& v, double omega) {
    const int n = edges.size();
    const double L = edges.r.sum();
    // Theorem-3 substitution for dL/dt
    const double dL = edges.kappa.dot(v.cwiseProduct(edges.r));

    Eigen::VectorXd c(n), s(n);
    for (int i = 0; i < n; ++i) {
        c(i) = std::cos(0.5 * vertices.phi(i));
        s(i) = std::sin(0.5 * vertices.phi(i));
        if (!(std::abs(c(i)) > 1e-12)) throw std::runtime_error("cusp at vertex " + std::to_string(i + 1));
    }

    // W_i c_i - W_{i-1} c_{i-1} = psi_i for i = 1..n-1, then one closure row
    Eigen::VectorXd Psi(n);
    Psi(0) = 0.0;
    for (int i = 1; i < n; ++i) {
        const double psi = -V(i) * s(i) - V(i - 1) * s(i - 1) + dL / n + (L / n - edges.r(i)) * omega;
        Psi(i) = Psi(i - 1) + psi;
    }

    Eigen::VectorXd rstar(n);
    for (int i = 0; i < n; ++i) rstar(i) = 0.5 * (edges.r(i) + edges.r(wrap_index(i + 1, n)));

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += Psi(i) / c(i) * rstar(i);
        den += rstar(i) / c(i);
    }
    const double W0 = -num / (c(0) * den);

    Eigen::VectorXd W(n);
    for (int i = 0; i < n; ++i) W(i) = (Psi(i) + W0 * c(0)) / c(i);
    return W;
}

Points rhs(const PolygonalCurve& curve, const FlowModel& model, double omega) {
    const EdgeFrame edges = edge_frame(curve);
    const VertexFrame vertices = vertex_frame(edges);
    const Eigen::VectorXd v = normal_velocity(model, curve, edges);
    const Eigen::VectorXd V = vertex_normal_velocity(v, vertices);
    const Eigen::VectorXd W = aud_tangential_velocity(curve, edges, vertices, V, v, omega);
    const int n = curve.size();
    Points dX(n, 2);
    for (int i = 0; i < n; ++i)
        dX.row(i) = V(i) * Vec2(vertices.N.row(i)) + W(i) * Vec2(vertices.T.row(i));
    return dX;
}

Points rhs(const Points& X, const FlowModel& model, double omega) {
    return rhs(PolygonalCurve(X), model, omega);
}

PolygonalCurve rk4_step(const PolygonalCurve& curve, const FlowModel& model, double omega, double dt,
                        Points* last_candidate) {
    const Points& X = curve.vertices();
    Points Xn = X;
    try {
        const Points k1 = rhs(X, model, omega);
        const Points k2 = rhs(Points(X + 0.5 * dt * k1), model, omega);
        const Points k3 = rhs(Points(X + 0.5 * dt * k2), model, omega);
        const Points k4 = rhs(Points(X + dt * k3), model, omega);
        Xn = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (last_candidate) *last_candidate = Xn;
        if (!Xn.allFinite()) throw std::runtime_error("non-finite update");
        return PolygonalCurve(Xn);
    } catch (const std::exception& e) {
        if (last_candidate) *last_candidate = Xn;
        throw std::runtime_error(std::string("explicit blow-up: ") + e.what());
    }
}

}  // namespace curveflow
