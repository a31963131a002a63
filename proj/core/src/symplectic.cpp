#include "curveflow/symplectic.hpp"

#include <cmath>
#include <stdexcept>

#include "curveflow/fullydiscrete.hpp"
#include "curveflow/semidiscrete.hpp"

namespace curveflow {

ButcherTableau::ButcherTableau(Eigen::MatrixXd a, Eigen::VectorXd b, bool require_canonical)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size() || a_.cols() != b_.size())
        throw std::invalid_argument("tableau shape mismatch");
    if (require_canonical && !canonical_check(*this))
        throw std::invalid_argument("tableau is not canonical");
}

bool canonical_check(const ButcherTableau& t) {
    const int s = t.stages();
    for (int j = 0; j < s; ++j)
        for (int k = 0; k < s; ++k) {
            const double lhs = t.b()(j) * t.a()(j, k) + t.b()(k) * t.a()(k, j);
            if (std::abs(lhs - t.b()(j) * t.b()(k)) > 1e-14) return false;
        }
    return true;
}

ButcherTableau midpoint_tableau() {
    Eigen::MatrixXd a(1, 1);
    a << 0.5;
    Eigen::VectorXd b(1);
    b << 1.0;
    return ButcherTableau(a, b);
}

ButcherTableau gauss2_tableau() {
    const double s3 = std::sqrt(3.0) / 6.0;
    Eigen::MatrixXd a(2, 2);
    a << 0.25, 0.25 - s3, 0.25 + s3, 0.25;
    Eigen::VectorXd b(2);
    b << 0.5, 0.5;
    return ButcherTableau(a, b);
}

ButcherTableau explicit_euler_tableau() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, 1);
    Eigen::VectorXd b(1);
    b << 1.0;
    return ButcherTableau(a, b, false);
}

ButcherTableau rk4_classic_tableau() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(1, 0) = 0.5;
    a(2, 1) = 0.5;
    a(3, 2) = 1.0;
    Eigen::VectorXd b(4);
    b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
    return ButcherTableau(a, b, false);
}

namespace {

Eigen::VectorXd flatten_rhs(const Points& X, const FlowModel& model, double omega) {
    const Points dX = rhs(X, model, omega);
    Eigen::VectorXd f(2 * dX.rows());
    for (int i = 0; i < dX.rows(); ++i) {
        f(2 * i) = dX(i, 0);
        f(2 * i + 1) = dX(i, 1);
    }
    return f;
}

Points unflatten(const Eigen::VectorXd& x, int n) {
    Points X(n, 2);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = x(2 * i);
        X(i, 1) = x(2 * i + 1);
    }
    return X;
}

}  // namespace

PolygonalCurve srk_step(const PolygonalCurve& curve, double dt, const ButcherTableau& tableau,
                        const FlowModel& model, double omega, double tol, SrkStats* stats) {
    if (!canonical_check(tableau)) throw std::invalid_argument("tableau is not canonical");
    const int n = curve.size();
    const int s = tableau.stages();
    const int dim = 2 * n;
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < n; ++i) {
        x0(2 * i) = curve.vertices()(i, 0);
        x0(2 * i + 1) = curve.vertices()(i, 1);
    }

    // stage equations Y_k - X - dt sum_j a_kj F(Y_j) = 0, unknowns Z = (Y_1..Y_s)
    const auto G = [&](const Eigen::VectorXd& z) {
        Eigen::MatrixXd Fz(dim, s);
        for (int k = 0; k < s; ++k) Fz.col(k) = flatten_rhs(unflatten(z.segment(k * dim, dim), n), model, omega);
        Eigen::VectorXd g(s * dim);
        for (int k = 0; k < s; ++k) {
            Eigen::VectorXd acc = z.segment(k * dim, dim) - x0;
            for (int j = 0; j < s; ++j) acc -= dt * tableau.a()(k, j) * Fz.col(j);
            g.segment(k * dim, dim) = acc;
        }
        return g;
    };

    Eigen::VectorXd z0(s * dim);
    for (int k = 0; k < s; ++k) z0.segment(k * dim, dim) = x0;
    const detail::NewtonReport rep = detail::damped_newton(z0, G, tol);

    Eigen::VectorXd xn = x0;
    if (stats) {
        stats->newton_iters = rep.iters;
        stats->residual_norm = rep.rmax;
        stats->stages.clear();
    }
    for (int k = 0; k < s; ++k) {
        const Points Yk = unflatten(rep.x.segment(k * dim, dim), n);
        if (stats) stats->stages.push_back(Yk);
        xn += dt * tableau.b()(k) * flatten_rhs(Yk, model, omega);
    }
    return PolygonalCurve(unflatten(xn, n));
}

}  // namespace curveflow
