#include "curveflow/timeseries.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace curveflow {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,dt,length,area,newton_iters,residual,uniformity\n";
    for (const StepRecord& r : series.rows) {
        out << format_g17(r.t) << ',' << format_g17(r.dt) << ',' << format_g17(r.length) << ','
            << format_g17(r.area) << ',' << r.newton_iters << ',' << format_g17(r.residual) << ','
            << format_g17(r.uniformity) << '\n';
    }
}

void write_points_csv(const std::string& path, const Points& X) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (int i = 0; i < X.rows(); ++i)
        out << format_g17(X(i, 0)) << ',' << format_g17(X(i, 1)) << '\n';
}

StepRecord make_record(double t, double dt, const Points& X, int newton_iters, double residual) {
    StepRecord rec;
    rec.t = t;
    rec.dt = dt;
    rec.length = polygon_length(X);
    rec.area = polygon_area(X);
    rec.newton_iters = newton_iters;
    rec.residual = residual;
    const Eigen::VectorXd r = edge_lengths(X);
    const double target = rec.length / static_cast<double>(X.rows());
    rec.uniformity = (r.array() - target).abs().maxCoeff();
    return rec;
}

}  // namespace curveflow
