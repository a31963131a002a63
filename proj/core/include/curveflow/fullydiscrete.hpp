#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "curveflow/flows.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/timeseries.hpp"

namespace curveflow {

// Near curve coincidence the exact normal branch flips discontinuously across
// phibar = 0 and the Gram weights blow up; the guard blends toward the edge
// bisector (window, in units of |phibar|) and toward ratio weights (caps) to
// keep the finite-difference Newton stable. window = 0 disables the blend.
struct FrameGuard {
    double window = 0.25;
    double cap_lo = 2.0;
    double cap_hi = 4.0;
};

struct MidpointFrame {
    Points Xbar;             // midpoint curve
    Eigen::VectorXd r_new;   // edge lengths of the candidate curve
    Eigen::VectorXd r_old;   // edge lengths of the previous curve
    Eigen::VectorXd rbar;    // edge lengths of the midpoint curve
    Eigen::VectorXd m;       // (r_new + r_old)/2, two-curve difference denominators
    Points tbar;             // midpoint-curve edge tangents
    Points nbar;             // midpoint-curve edge normals
    Eigen::VectorXd phibar;  // midpoint-curve turning angles
    Points Nbar;             // implicit vertex normals
    Points Tbar;             // implicit vertex tangents, Tbar = J Nbar
    Eigen::VectorXd F;       // normal part of the difference-of-differences
    Eigen::VectorXd G;       // tangential part, exactly 0 on the unguarded branch
    Eigen::VectorXd alpha;   // weights with Nbar_i = alpha_i nbar_i + beta_i nbar_{i+1}
    Eigen::VectorXd beta;
    Eigen::VectorXd kappa;   // implicit curvature per edge
    int size() const { return static_cast<int>(rbar.size()); }
};

MidpointFrame midpoint_frame(const Points& X_new, const Points& X_old, const FrameGuard& guard = {});

// Vbar_i = alpha_i vbar_i + beta_i vbar_{i+1}
Eigen::VectorXd implicit_normal_velocity(const MidpointFrame& frame, const Eigen::VectorXd& v);

enum class AudClosure {
    SimpleAverage,  // sum_i Wbar_i (rbar_i + rbar_{i+1})/2 = 0
    ZeroWeightedG,  // sum_i Gbar_i Wbar_i = 0
};

// tangential velocities of the fully discrete uniform distribution system
Eigen::VectorXd discrete_aud(const MidpointFrame& frame, const Eigen::VectorXd& V, double dt,
                             double omega, double L_new, double L_old, const Eigen::VectorXd& r_new,
                             const Eigen::VectorXd& r_old,
                             AudClosure closure = AudClosure::SimpleAverage);

// edge velocities evaluated on a midpoint frame
using EdgeVelocityFn = std::function<Eigen::VectorXd(const MidpointFrame&)>;
EdgeVelocityFn edge_velocity_fn(const FlowModel& model);

// R_i = (X_i - Xhat_i)/dt - Vbar_i Nbar_i - Wbar_i Tbar_i, flattened (x0,y0,x1,y1,...)
Eigen::VectorXd residual(const Points& X_new, const Points& X_old, double dt, const FlowModel& model,
                         double omega, const FrameGuard& guard = {});
Eigen::VectorXd residual(const Points& X_new, const Points& X_old, double dt,
                         const EdgeVelocityFn& velocity, double omega, const FrameGuard& guard = {});

struct StepResult {
    Points X;                     // accepted curve
    double dt = 0.0;
    int newton_iters = 0;
    double residual_norm = 0.0;   // max norm at acceptance
    double dissipation = 0.0;     // sum kappabar vbar rbar at the solution
    double gw = 0.0;              // sum Gbar Wbar at the solution
    double identity_defect = 0.0; // |(L_new - L_old)/dt - dissipation + gw|
    double max_G = 0.0;
    bool g_nonzero = false;       // any |Gbar_i| > 1e-12
};

StepResult newton_step_solve(const Points& X_old, double dt, const FlowModel& model, double omega,
                             double tol = 1e-8, const FrameGuard& guard = {});
StepResult newton_step_solve(const Points& X_old, double dt, const EdgeVelocityFn& velocity,
                             double omega, double tol = 1e-8, const FrameGuard& guard = {});

// dt^0 = min(tau, (sum kappa_i^2 r_i)^-2); dt^{n+1} = min(tau, ((L'-L)/dt)^-2)
struct StepController {
    double tau = 0.01;
    double initial_dt(const PolygonalCurve& curve) const;
    double next_dt(double L_new, double L_old, double dt_prev) const;
};

struct OmegaRule {
    bool scaled = true;    // omega = 10 N / dt
    double constant = 0.0; // used when scaled == false
    double operator()(int n, double dt) const { return scaled ? 10.0 * n / dt : constant; }
};

struct EvolveParams {
    double tau = 0.01;
    OmegaRule omega{};
    double tol = 1e-8;
    double t_end = 1.0;
    std::optional<double> fixed_dt{};  // disables the adaptive controller and retries
    int max_retries = 10;
    FrameGuard guard{};
    // called after each accepted step with (t, curve)
    std::function<void(double, const Points&)> observer{};
};

struct EvolveResult {
    TimeSeries series;
    Points X;
};

EvolveResult evolve(const PolygonalCurve& X0, const FlowModel& model, const EvolveParams& params);

namespace detail {

struct NewtonReport {
    Eigen::VectorXd x;
    int iters = 0;
    double rmax = 0.0;
};

// damped Newton with forward-difference Jacobian and Armijo backtracking on
// the residual 2-norm; throws "step rejected: ..." if rmax stays above
// max(tol, tol_floor). tol_floor covers problems whose residual moves more
// than tol per coordinate ulp, where an absolute test cannot be met.
NewtonReport damped_newton(const Eigen::VectorXd& x0,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           double tol, double tol_floor = 0.0, int max_iter = 50);

}  // namespace detail

}  // namespace curveflow
