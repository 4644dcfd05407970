#pragma once

#include <span>
#include <string>

#include "cryodaq/registry.hpp"

namespace cryodaq::plot {

struct PlotLabels {
    std::string title;
    std::string x_label = "time [s]";
    std::string y_label;
};

/// XY line plot of time index vs calibrated value as a standalone SVG
/// document: linear axes autoscaled to the finite data, five ticks per axis,
/// and a single <polyline>. Non-finite points are left out.
std::string render_svg(std::span<const Sample> records, const PlotLabels& labels);

}  // namespace cryodaq::plot
