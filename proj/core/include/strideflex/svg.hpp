#pragma once

#include "strideflex/error_metrics.hpp"

#include <string>
#include <vector>

namespace strideflex::svg {

struct Line {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string y_label;
    std::vector<Line> lines;
};

/// Self-contained SVG document with the panels laid out row-major,
/// `columns` per row, sharing one legend built from the first panel.
std::string small_multiples(const std::vector<Panel>& panels, std::size_t columns, const std::string& title);

/// Mean truth and candidate curves per channel (rows) and side (columns).
std::string mean_curves(const ErrorReport& r);

/// Per-subject mean absolute error curves per channel and side.
std::string subject_error_curves(const ErrorReport& r);

} // namespace strideflex::svg
