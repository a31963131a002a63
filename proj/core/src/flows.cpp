#include "curveflow/flows.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace curveflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int wrap_index(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

}  // namespace

double mfs_fundamental(const Vec2& x) { return std::log(x.norm()) / two_pi; }

bool point_in_polygon(const Points& X, const Vec2& p) {
    const int n = static_cast<int>(X.rows());
    bool inside = false;
    for (int i = 0; i < n; ++i) {
        const Vec2 a = X.row(wrap_index(i - 1, n));
        const Vec2 b = X.row(i);
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double xc = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < xc) inside = !inside;
        }
    }
    return inside;
}

MfsSystem solve_mfs(const Points& X, const Eigen::VectorXd& data, const SingularPointRule& rule) {
    const int n = static_cast<int>(X.rows());
    if (data.size() != n) throw std::invalid_argument("MFS data size mismatch");
    MfsSystem sys;
    sys.collocation.resize(n, 2);
    sys.sources.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        const Vec2 a = X.row(wrap_index(i - 1, n));
        const Vec2 b = X.row(i);
        const Vec2 d = b - a;
        const double r = d.norm();
        if (!(r > 0.0)) throw std::runtime_error("degenerate edge " + std::to_string(i + 1));
        const Vec2 t = d / r;
        const Vec2 nu(t.y(), -t.x());
        sys.collocation.row(i) = 0.5 * (a + b);
        sys.sources.row(i) = Vec2(sys.collocation.row(i)) + rule.rho * r * nu;
    }
    for (int j = 0; j < n; ++j) {
        if (point_in_polygon(X, sys.sources.row(j))) throw std::runtime_error("invalid placement");
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Ones(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 d = Vec2(sys.collocation.row(i)) - Vec2(sys.sources.row(j));
            A(i, j + 1) = mfs_fundamental(d);
        }
        rhs(i) = data(i);
    }
    A(n, 0) = 0.0;
    rhs(n) = 0.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rcond = lu.rcond();
    sys.cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(sys.cond < 1e14)) throw std::runtime_error("MFS ill-conditioned");
    const Eigen::VectorXd q = lu.solve(rhs);
    if (!q.allFinite()) throw std::runtime_error("MFS ill-conditioned");
    sys.Q0 = q(0);
    sys.Q = q.tail(n);
    return sys;
}

MfsSystem solve_mfs(const PolygonalCurve& curve, const Eigen::VectorXd& data,
                    const SingularPointRule& rule) {
    return solve_mfs(curve.vertices(), data, rule);
}

double mfs_potential(const MfsSystem& sys, const Vec2& x) {
    double p = sys.Q0;
    for (int j = 0; j < sys.size(); ++j) {
        const Vec2 d = x - Vec2(sys.sources.row(j));
        p += sys.Q(j) * mfs_fundamental(d);
    }
    return p;
}

Vec2 mfs_gradient(const MfsSystem& sys, const Vec2& x) {
    Vec2 g = Vec2::Zero();
    for (int j = 0; j < sys.size(); ++j) {
        const Vec2 d = x - Vec2(sys.sources.row(j));
        const double n2 = d.squaredNorm();
        if (!(n2 > 0.0)) throw std::domain_error("MFS gradient at singular point");
        g += sys.Q(j) / (two_pi * n2) * d;
    }
    return g;
}

double mfs_segment_flux(const MfsSystem& sys, const Vec2& a, const Vec2& b) {
    double flux = 0.0;
    for (int j = 0; j < sys.size(); ++j) {
        const Vec2 y = sys.sources.row(j);
        const Vec2 da = a - y;
        const Vec2 db = b - y;
        const double dth = std::remainder(std::atan2(db.y(), db.x()) - std::atan2(da.y(), da.x()), two_pi);
        flux += sys.Q(j) * dth / two_pi;
    }
    return flux;
}

Eigen::VectorXd edge_velocity(const FlowModel& model, const Points& X, const Eigen::VectorXd& r,
                              const Eigen::VectorXd& kappa) {
    const int n = static_cast<int>(X.rows());
    return std::visit(
        [&](const auto& m) -> Eigen::VectorXd {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Mcf>) {
                return -kappa;
            } else if constexpr (std::is_same_v<M, Apmcf>) {
                const double mean = kappa.dot(r) / r.sum();
                return (-kappa).array() + mean;
            } else {
                const Eigen::VectorXd data = m.sigma * kappa;
                const MfsSystem sys = solve_mfs(X, data, m.placement);
                Eigen::VectorXd v(n);
                for (int i = 0; i < n; ++i) {
                    const Vec2 a = X.row(wrap_index(i - 1, n));
                    const Vec2 b = X.row(i);
                    v(i) = -mfs_segment_flux(sys, a, b) / r(i);
                }
                return v;
            }
        },
        model);
}

Eigen::VectorXd normal_velocity(const FlowModel& model, const PolygonalCurve& curve,
                                const EdgeFrame& edges) {
    return edge_velocity(model, curve.vertices(), edges.r, edges.kappa);
}

}  // namespace curveflow
