#pragma once

#include <string>
#include <utility>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow {

// closed-polygon overlays, one color per snapshot, labeled by time
void svg_curves(const std::string& path, const std::vector<std::pair<double, Points>>& snapshots);

struct SvgSeries {
    std::string name;
    std::vector<double> y;
};

// simple line chart of one or more series over a shared abscissa
void svg_chart(const std::string& path, const std::string& title, const std::vector<double>& x,
               const std::vector<SvgSeries>& series, bool log_y = false);

}  // namespace curveflow
