#pragma once

#include "curveflow/flows.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

// V_i = (v_i + v_{i+1}) / (2 cos(phi_i/2))
Eigen::VectorXd vertex_normal_velocity(const Eigen::VectorXd& v, const VertexFrame& vertices);

// tangential velocities of the asymptotic uniform distribution method,
// closed by sum_i W_i (r_i + r_{i+1})/2 = 0
Eigen::VectorXd aud_tangential_velocity(const PolygonalCurve& curve, const EdgeFrame& edges,
                                        const VertexFrame& vertices, const Eigen::VectorXd& V,
                                        const Eigen::VectorXd& v, double omega);

// full evolution-law right-hand side, dX_i/dt = V_i N_i + W_i T_i
Points rhs(const PolygonalCurve& curve, const FlowModel& model, double omega);
Points rhs(const Points& X, const FlowModel& model, double omega);

// classical explicit Runge-Kutta reference step; on NaN/overflow or an
// invalid stage curve throws "explicit blow-up: ...". If last_candidate is
// given it receives the raw update for diagnostics before any throw.
PolygonalCurve rk4_step(const PolygonalCurve& curve, const FlowModel& model, double omega, double dt,
                        Points* last_candidate = nullptr);

}  // namespace curveflow
