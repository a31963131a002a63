#include "curveflow/fullydiscrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace curveflow {

namespace {

int wrap_index(int i, int n) {
    int m = i % n;
    return m < 0 ? m + n : m;
}

double clip01(double x) { return std::min(1.0, std::max(0.0, x)); }

Eigen::VectorXd checked_edge_lengths(const Points& X, const char* which) {
    const int n = static_cast<int>(X.rows());
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = X.row(i) - X.row(wrap_index(i - 1, n));
        r(i) = d.norm();
        if (!(r(i) > 0.0))
            throw std::runtime_error(std::string("degenerate edge ") + std::to_string(i + 1) +
                                     " on " + which + " curve");
    }
    return r;
}

Eigen::VectorXd flatten(const Points& X) {
    const int n = static_cast<int>(X.rows());
    Eigen::VectorXd x(2 * n);
    for (int i = 0; i < n; ++i) {
        x(2 * i) = X(i, 0);
        x(2 * i + 1) = X(i, 1);
    }
    return x;
}

Points unflatten(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size()) / 2;
    Points X(n, 2);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = x(2 * i);
        X(i, 1) = x(2 * i + 1);
    }
    return X;
}

}  // namespace

MidpointFrame midpoint_frame(const Points& X_new, const Points& X_old, const FrameGuard& guard) {
    const int n = static_cast<int>(X_new.rows());
    if (X_old.rows() != n) throw std::invalid_argument("curve size mismatch");

    MidpointFrame f;
    f.r_new = checked_edge_lengths(X_new, "candidate");
    f.r_old = checked_edge_lengths(X_old, "previous");
    f.Xbar = 0.5 * (X_new + X_old);
    f.m = 0.5 * (f.r_new + f.r_old);

    f.rbar.resize(n);
    f.tbar.resize(n, 2);
    f.nbar.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = f.Xbar.row(i) - f.Xbar.row(wrap_index(i - 1, n));
        f.rbar(i) = d.norm();
        if (!(f.rbar(i) > 0.0))
            throw std::runtime_error("degenerate edge " + std::to_string(i + 1) + " on midpoint curve");
        const Vec2 t = d / f.rbar(i);
        f.tbar.row(i) = t;
        f.nbar.row(i) = Vec2(t.y(), -t.x());
    }

    f.phibar.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 a = f.tbar.row(i);
        const Vec2 b = f.tbar.row(wrap_index(i + 1, n));
        f.phibar(i) = std::atan2(cross2(a, b), a.dot(b));
    }

    f.Nbar.resize(n, 2);
    f.Tbar.resize(n, 2);
    f.F.resize(n);
    f.G.resize(n);
    f.alpha.resize(n);
    f.beta.resize(n);

    for (int i = 0; i < n; ++i) {
        const int ip = wrap_index(i + 1, n);
        const Vec2 dXi = (f.rbar(i) / f.m(i)) * Vec2(f.tbar.row(i));
        const Vec2 dXp = (f.rbar(ip) / f.m(ip)) * Vec2(f.tbar.row(ip));
        const Vec2 D = dXp - dXi;
        const double nd = D.norm();
        const double phi = f.phibar(i);
        const double sgn = phi > 0.0 ? 1.0 : (phi < 0.0 ? -1.0 : 0.0);

        Vec2 bis = Vec2(f.nbar.row(i)) + Vec2(f.nbar.row(ip));
        const double bn = bis.norm();
        if (bn > 0.0) bis /= bn;

        double w = 0.0;
        Vec2 Dd = Vec2::Zero();
        if (sgn != 0.0 && nd > 0.0) {
            Dd = -sgn * D / nd;
            const double dev = std::atan2(std::abs(cross2(Dd, bis)), Dd.dot(bis));
            const double u = guard.window > 0.0
                                 ? dev / (guard.window * std::max(std::abs(phi), 1e-300))
                                 : 0.0;
            w = clip01(2.0 - u);
        }

        Vec2 N;
        if (w >= 1.0) {
            N = Dd;
            f.F(i) = -sgn * nd;
            f.G(i) = 0.0;
        } else {
            Vec2 blend = w * Dd + (1.0 - w) * bis;
            const double bnorm = blend.norm();
            N = bnorm > 0.0 ? Vec2(blend / bnorm) : bis;
            f.F(i) = D.dot(N);
            f.G(i) = D.dot(rot90(N));
        }
        f.Nbar.row(i) = N;
        f.Tbar.row(i) = rot90(N);

        // weights: Gram solution where finite and moderate, ratio fallback
        const double ratio_a = f.rbar(i) / (f.rbar(i) + f.rbar(ip));
        const double ratio_b = f.rbar(ip) / (f.rbar(i) + f.rbar(ip));
        double ga = std::numeric_limits<double>::infinity();
        double gb = std::numeric_limits<double>::infinity();
        if (phi != 0.0) {
            const double sphi = std::sin(phi);
            ga = cross2(N, f.nbar.row(ip)) / sphi;
            gb = cross2(f.nbar.row(i), N) / sphi;
        }
        double mag = std::max(std::abs(ga), std::abs(gb));
        if (!std::isfinite(mag)) mag = std::numeric_limits<double>::infinity();
        double w2 = clip01((guard.cap_hi - mag) / (guard.cap_hi - guard.cap_lo));
        if (!(w2 > 0.0)) {
            w2 = 0.0;
            ga = 0.0;
            gb = 0.0;
        }
        f.alpha(i) = w2 * ga + (1.0 - w2) * ratio_a;
        f.beta(i) = w2 * gb + (1.0 - w2) * ratio_b;
    }

    f.kappa.resize(n);
    for (int i = 0; i < n; ++i) {
        const int p = wrap_index(i - 1, n);
        f.kappa(i) = -(f.F(i) * f.alpha(i) + f.F(p) * f.beta(p)) / f.rbar(i);
    }
    return f;
}

Eigen::VectorXd implicit_normal_velocity(const MidpointFrame& frame, const Eigen::VectorXd& v) {
    const int n = frame.size();
    Eigen::VectorXd V(n);
    for (int i = 0; i < n; ++i) V(i) = frame.alpha(i) * v(i) + frame.beta(i) * v(wrap_index(i + 1, n));
    return V;
}

Eigen::VectorXd discrete_aud(const MidpointFrame& frame, const Eigen::VectorXd& V, double dt,
                             double omega, double L_new, double L_old, const Eigen::VectorXd& r_new,
                             const Eigen::VectorXd& r_old, AudClosure closure) {
    const int n = frame.size();
    const double dL = (L_new - L_old) / dt;
    (void)r_old;

    // telescoping pass: a_i W_i - b_i W_{i-1} = psi_i, i = 1..n-1
    Eigen::VectorXd p(n), q(n);
    p(0) = 0.0;
    q(0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const double c = frame.rbar(i) / frame.m(i);
        const Vec2 t = frame.tbar.row(i);
        const double a = c * t.dot(Vec2(frame.Tbar.row(i)));
        const double b = c * t.dot(Vec2(frame.Tbar.row(i - 1)));
        if (!(std::abs(a) > 1e-300)) throw std::runtime_error("singular telescoping coefficient");
        const double psi = -c * t.dot(Vec2(frame.Nbar.row(i))) * V(i) +
                           c * t.dot(Vec2(frame.Nbar.row(i - 1))) * V(i - 1) + dL / n +
                           (L_new / n - r_new(i)) * omega;
        p(i) = (psi + b * p(i - 1)) / a;
        q(i) = b * q(i - 1) / a;
    }

    Eigen::VectorXd weight(n);
    if (closure == AudClosure::SimpleAverage) {
        for (int i = 0; i < n; ++i) weight(i) = 0.5 * (frame.rbar(i) + frame.rbar(wrap_index(i + 1, n)));
    } else {
        weight = frame.G;
    }
    const double den = q.dot(weight);
    if (!(std::abs(den) > 1e-300)) throw std::runtime_error("singular telescoping coefficient");
    const double W0 = -p.dot(weight) / den;
    return p + q * W0;
}

EdgeVelocityFn edge_velocity_fn(const FlowModel& model) {
    return [model](const MidpointFrame& f) {
        return edge_velocity(model, f.Xbar, f.rbar, f.kappa);
    };
}

namespace {

struct ResidualParts {
    MidpointFrame frame;
    Eigen::VectorXd v, V, W;
    Eigen::VectorXd R;
};

ResidualParts residual_parts(const Points& X_new, const Points& X_old, double dt,
                             const EdgeVelocityFn& velocity, double omega, const FrameGuard& guard) {
    ResidualParts parts;
    parts.frame = midpoint_frame(X_new, X_old, guard);
    parts.v = velocity(parts.frame);
    parts.V = implicit_normal_velocity(parts.frame, parts.v);
    parts.W = discrete_aud(parts.frame, parts.V, dt, omega, parts.frame.r_new.sum(),
                           parts.frame.r_old.sum(), parts.frame.r_new, parts.frame.r_old);
    const int n = parts.frame.size();
    parts.R.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        const Vec2 rate = (Vec2(X_new.row(i)) - Vec2(X_old.row(i))) / dt;
        const Vec2 res = rate - parts.V(i) * Vec2(parts.frame.Nbar.row(i)) -
                         parts.W(i) * Vec2(parts.frame.Tbar.row(i));
        parts.R(2 * i) = res.x();
        parts.R(2 * i + 1) = res.y();
    }
    return parts;
}

}  // namespace

Eigen::VectorXd residual(const Points& X_new, const Points& X_old, double dt,
                         const EdgeVelocityFn& velocity, double omega, const FrameGuard& guard) {
    return residual_parts(X_new, X_old, dt, velocity, omega, guard).R;
}

Eigen::VectorXd residual(const Points& X_new, const Points& X_old, double dt, const FlowModel& model,
                         double omega, const FrameGuard& guard) {
    return residual(X_new, X_old, dt, edge_velocity_fn(model), omega, guard);
}

namespace detail {

NewtonReport damped_newton(const Eigen::VectorXd& x0,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           double tol, double tol_floor, int max_iter) {
    const double tol_eff = std::max(tol, tol_floor);
    Eigen::VectorXd x = x0;
    Eigen::VectorXd R;
    try {
        R = F(x);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("step rejected: ") + e.what());
    }
    const int m = static_cast<int>(R.size());
    int iters = 0;

    for (int it = 0; it < max_iter; ++it) {
        const double rmax = R.lpNorm<Eigen::Infinity>();
        if (rmax <= 1e-12) break;

        Eigen::MatrixXd J(m, static_cast<int>(x.size()));
        try {
            for (int j = 0; j < x.size(); ++j) {
                const double h = 1e-7 * (1.0 + std::abs(x(j)));
                Eigen::VectorXd xp = x;
                xp(j) += h;
                J.col(j) = (F(xp) - R) / h;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("step rejected: ") + e.what());
        }

        const Eigen::VectorXd d = J.partialPivLu().solve(-R);
        if (!d.allFinite()) break;

        const double n2 = R.squaredNorm();
        double lambda = 1.0;
        bool accepted = false;
        Eigen::VectorXd xt, Rt;
        while (lambda >= std::ldexp(1.0, -24)) {
            xt = x + lambda * d;
            bool ok = true;
            try {
                Rt = F(xt);
            } catch (const std::exception&) {
                ok = false;
            }
            if (ok && Rt.squaredNorm() <= (1.0 - 1e-4 * lambda) * n2) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;

        x = xt;
        R = Rt;
        ++iters;
        const double newmax = R.lpNorm<Eigen::Infinity>();
        if (newmax <= tol_eff && (newmax > 0.25 * rmax || lambda < 1e-3)) break;
    }

    NewtonReport rep;
    rep.x = x;
    rep.iters = iters;
    rep.rmax = R.lpNorm<Eigen::Infinity>();
    if (!(rep.rmax <= tol_eff))
        throw std::runtime_error("step rejected: residual " + format_g17(rep.rmax));
    return rep;
}

}  // namespace detail

StepResult newton_step_solve(const Points& X_old, double dt, const EdgeVelocityFn& velocity,
                             double omega, double tol, const FrameGuard& guard) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const auto F = [&](const Eigen::VectorXd& x) {
        return residual(unflatten(x), X_old, dt, velocity, omega, guard);
    };
    // the tangential part of the residual shifts by about eps*omega per
    // coordinate ulp; below that an absolute max-norm test is unattainable
    const double granularity = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(omega) *
                               std::max(1.0, X_old.cwiseAbs().maxCoeff());
    const detail::NewtonReport rep = detail::damped_newton(flatten(X_old), F, tol, granularity);

    StepResult result;
    result.X = unflatten(rep.x);
    result.dt = dt;
    result.newton_iters = rep.iters;
    result.residual_norm = rep.rmax;

    ResidualParts parts;
    try {
        parts = residual_parts(result.X, X_old, dt, velocity, omega, guard);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("step rejected: ") + e.what());
    }
    const MidpointFrame& f = parts.frame;
    result.dissipation = f.kappa.dot(parts.v.cwiseProduct(f.rbar));
    result.gw = f.G.dot(parts.W);
    result.max_G = f.G.cwiseAbs().maxCoeff();
    result.g_nonzero = result.max_G > 1e-12;
    const double rate = (f.r_new.sum() - f.r_old.sum()) / dt;
    result.identity_defect = std::abs(rate - result.dissipation + result.gw);
    return result;
}

StepResult newton_step_solve(const Points& X_old, double dt, const FlowModel& model, double omega,
                             double tol, const FrameGuard& guard) {
    return newton_step_solve(X_old, dt, edge_velocity_fn(model), omega, tol, guard);
}

double StepController::initial_dt(const PolygonalCurve& curve) const {
    const EdgeFrame f = edge_frame(curve);
    const double S = f.kappa.array().square().matrix().dot(f.r);
    if (S == 0.0) return tau;
    return std::min(tau, 1.0 / (S * S));
}

double StepController::next_dt(double L_new, double L_old, double dt_prev) const {
    const double rate = (L_new - L_old) / dt_prev;
    if (rate == 0.0) return tau;
    return std::min(tau, 1.0 / (rate * rate));
}

EvolveResult evolve(const PolygonalCurve& X0, const FlowModel& model, const EvolveParams& params) {
    const int n = X0.size();
    const EdgeVelocityFn velocity = edge_velocity_fn(model);
    const StepController controller{params.tau};

    EvolveResult out;
    out.X = X0.vertices();
    double t = 0.0;
    double dt = params.fixed_dt ? *params.fixed_dt : controller.initial_dt(X0);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(params.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");

    out.series.rows.push_back(make_record(0.0, 0.0, out.X, 0, 0.0));
    if (params.observer) params.observer(0.0, out.X);

    const double t_eps = 1e-12 * std::max(1.0, params.t_end);
    while (params.t_end - t > t_eps) {
        double dt_try = std::min(dt, params.t_end - t);
        StepResult step;
        int attempts = 0;
        for (;;) {
            const double omega = params.omega(n, dt_try);
            try {
                step = newton_step_solve(out.X, dt_try, velocity, omega, params.tol, params.guard);
                break;
            } catch (const std::exception&) {
                ++attempts;
                if (params.fixed_dt || attempts > params.max_retries) throw;
                dt_try *= 0.5;
            }
        }

        const double L_old = polygon_length(out.X);
        out.X = step.X;
        t += step.dt;
        StepRecord rec = make_record(t, step.dt, out.X, step.newton_iters, step.residual_norm);
        rec.dissipation = step.dissipation;
        rec.identity_defect = step.identity_defect;
        rec.max_G = step.max_G;
        rec.g_nonzero = step.g_nonzero;
        out.series.rows.push_back(rec);
        if (params.observer) params.observer(t, out.X);

        dt = params.fixed_dt ? *params.fixed_dt : controller.next_dt(rec.length, L_old, step.dt);
    }
    return out;
}

}  // namespace curveflow
