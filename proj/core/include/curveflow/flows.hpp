#pragma once

#include <variant>

#include "curveflow/geometry.hpp"

namespace curveflow {

struct Mcf {};

struct Apmcf {};

// singular points sit at y_i = mid_i + rho * r_i * n_i, outside the region
struct SingularPointRule {
    double rho = 1.0;
};

struct HeleShaw {
    double sigma = 1.0;
    SingularPointRule placement{};
};

using FlowModel = std::variant<Mcf, Apmcf, HeleShaw>;

struct MfsSystem {
    double Q0 = 0.0;
    Eigen::VectorXd Q;   // source strengths, sum(Q) = 0
    Points sources;      // y_j
    Points collocation;  // edge midpoints
    double cond = 0.0;   // condition estimate of the collocation matrix
    int size() const { return static_cast<int>(Q.size()); }
};

// fundamental solution E(x) = log|x| / (2 pi)
double mfs_fundamental(const Vec2& x);

// collocation solve: P(mid_i) = data_i, P(x) = Q0 + sum_j Q_j E(x - y_j),
// closed by sum_j Q_j = 0
MfsSystem solve_mfs(const Points& X, const Eigen::VectorXd& data, const SingularPointRule& rule = {});
MfsSystem solve_mfs(const PolygonalCurve& curve, const Eigen::VectorXd& data,
                    const SingularPointRule& rule = {});

double mfs_potential(const MfsSystem& sys, const Vec2& x);
Vec2 mfs_gradient(const MfsSystem& sys, const Vec2& x);

// exact integral of grad P . nu over the segment a -> b, nu the right normal;
// per source this is the subtended angle times Q_j / (2 pi)
double mfs_segment_flux(const MfsSystem& sys, const Vec2& a, const Vec2& b);

// edge normal velocities of a flow evaluated on one curve's frame
Eigen::VectorXd edge_velocity(const FlowModel& model, const Points& X, const Eigen::VectorXd& r,
                              const Eigen::VectorXd& kappa);
Eigen::VectorXd normal_velocity(const FlowModel& model, const PolygonalCurve& curve,
                                const EdgeFrame& edges);

bool point_in_polygon(const Points& X, const Vec2& p);

}  // namespace curveflow
