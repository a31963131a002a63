#pragma once

#include <vector>

#include "curveflow/flows.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

class ButcherTableau {
public:
    // throws if require_canonical and the canonical condition fails
    ButcherTableau(Eigen::MatrixXd a, Eigen::VectorXd b, bool require_canonical = true);

    int stages() const { return static_cast<int>(b_.size()); }
    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::VectorXd& b() const { return b_; }

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
};

// b_j a_jk + b_k a_kj = b_j b_k for all j,k, to 1e-14
bool canonical_check(const ButcherTableau& tableau);

ButcherTableau midpoint_tableau();
ButcherTableau gauss2_tableau();
ButcherTableau explicit_euler_tableau();
ButcherTableau rk4_classic_tableau();

struct SrkStats {
    int newton_iters = 0;
    double residual_norm = 0.0;
    std::vector<Points> stages;
};

// canonical Runge-Kutta step of the semi-discrete law; all stage equations
// are solved monolithically by the damped Newton used by the implicit scheme
PolygonalCurve srk_step(const PolygonalCurve& curve, double dt, const ButcherTableau& tableau,
                        const FlowModel& model, double omega, double tol = 1e-8,
                        SrkStats* stats = nullptr);

}  // namespace curveflow
