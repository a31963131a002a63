#pragma once

#include <string>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow {

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double length = 0.0;
    double area = 0.0;
    int newton_iters = 0;
    double residual = 0.0;
    double uniformity = 0.0;  // max_i |r_i - L/N|
    // diagnostics kept in memory, not written to the CSV table
    double dissipation = 0.0;
    double identity_defect = 0.0;
    double max_G = 0.0;
    bool g_nonzero = false;
};

struct TimeSeries {
    std::vector<StepRecord> rows;
};

// header t,dt,length,area,newton_iters,residual,uniformity; 17 significant digits
void write_csv(const std::string& path, const TimeSeries& series);

// rows x,y with 17 significant digits
void write_points_csv(const std::string& path, const Points& X);

std::string format_g17(double x);

StepRecord make_record(double t, double dt, const Points& X, int newton_iters, double residual);

}  // namespace curveflow
