#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "curveflow/fullydiscrete.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

struct ExperimentConfig {
    std::string flow = "apmcf";        // mcf | apmcf | heleshaw
    std::string scheme = "implicit";   // implicit | rk4 | midpoint-srk
    int N = 50;
    double tau = 0.01;
    std::string omega_rule = "auto";   // "auto" (10 N / dt) or a constant
    double sigma = 1.0;
    double rho = 1.0;
    double tol = 1e-8;
    double t_end = 1.0;
    std::optional<double> dt{};        // uniform step override; required for rk4 and midpoint-srk
    int snapshots = 5;
    std::string out = "out";
    bool svg = false;
    unsigned long seed = 0;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// key = value lines; '#' starts a comment
ExperimentConfig load_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

FlowModel make_flow(const ExperimentConfig& cfg);
OmegaRule make_omega(const ExperimentConfig& cfg);

PolygonalCurve initial_curve(int N);

// slides vertices tangentially (zero normal velocity) with the implicit
// stepper until max_i |r_i - L/N| <= tol_u * L
PolygonalCurve redistribute_uniform(const PolygonalCurve& curve, double omega, double tol_u = 1e-10,
                                    double dt = 0.01);

// exit codes: 0 ok, 2 step rejection, 3 blow-up, 4 config error
int run(const ExperimentConfig& cfg);

}  // namespace curveflow
