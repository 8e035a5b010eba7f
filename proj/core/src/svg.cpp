#include "strideflex/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace strideflex::svg {
namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 220.0;
constexpr double kMarginL = 52.0;
constexpr double kMarginR = 14.0;
constexpr double kMarginT = 28.0;
constexpr double kMarginB = 34.0;
constexpr double kHeader = 40.0;
constexpr double kLegendRow = 18.0;

const char* colour(std::size_t i) {
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % std::size(palette)];
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Round numbers for axis ticks: 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

void draw_panel(std::ostringstream& os, const Panel& p, double ox, double oy) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Line& l : p.lines) {
        for (std::size_t i = 0; i < l.x.size(); ++i) {
            if (!std::isfinite(l.y[i])) {
                continue;
            }
            xmin = std::min(xmin, l.x[i]);
            xmax = std::max(xmax, l.x[i]);
            ymin = std::min(ymin, l.y[i]);
            ymax = std::max(ymax, l.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin < 1e-9) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double step = nice_step(ymax - ymin, 4);
    ymin = std::floor(ymin / step) * step;
    ymax = std::ceil(ymax / step) * step;

    const double pw = kPanelW - kMarginL - kMarginR;
    const double ph = kPanelH - kMarginT - kMarginB;
    const double left = ox + kMarginL;
    const double top = oy + kMarginT;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    os << "<g>\n";
    os << "<text x=\"" << ox + kPanelW / 2 << "\" y=\"" << oy + 18 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << escape(p.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.8\"/>\n";
    for (double y = ymin; y <= ymax + step * 0.5; y += step) {
        const double py = sy(y);
        os << "<line x1=\"" << left << "\" y1=\"" << py << "\" x2=\"" << left + pw << "\" y2=\"" << py
           << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
        os << "<text x=\"" << left - 4 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
           << (std::abs(y) < step * 1e-6 ? 0.0 : y) << "</text>\n";
    }
    const double xstep = nice_step(xmax - xmin, 5);
    for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + xstep * 1e-6; x += xstep) {
        os << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 14 << "\" text-anchor=\"middle\" font-size=\"10\">" << x
           << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << oy + kPanelH - 4
       << "\" text-anchor=\"middle\" font-size=\"10\">% of stride</text>\n";
    os << "<text transform=\"translate(" << ox + 12 << ',' << top + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"10\">" << escape(p.y_label) << "</text>\n";
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        const Line& l = p.lines[i];
        os << "<polyline fill=\"none\" stroke=\"" << colour(i) << "\" stroke-width=\"1.6\"";
        if (l.dashed) {
            os << " stroke-dasharray=\"5,3\"";
        }
        os << " points=\"";
        for (std::size_t k = 0; k < l.x.size(); ++k) {
            if (std::isfinite(l.y[k])) {
                os << sx(l.x[k]) << ',' << sy(l.y[k]) << ' ';
            }
        }
        os << "\"/>\n";
    }
    os << "</g>\n";
}

std::vector<double> percent_axis() {
    std::vector<double> x;
    for (std::size_t b = 0; b < kErrorBins; ++b) {
        x.push_back(10.0 * static_cast<double>(b));
    }
    return x;
}

std::string panel_title(Channel c, Side s) {
    return std::string(name_of(s)) + " " + std::string(name_of(c));
}

} // namespace

std::string small_multiples(const std::vector<Panel>& panels, std::size_t columns, const std::string& title) {
    columns = std::max<std::size_t>(1, columns);
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    const std::size_t legend_items = panels.empty() ? 0 : panels.front().lines.size();
    const double width = kPanelW * static_cast<double>(columns);
    const double height = kHeader + kPanelH * static_cast<double>(rows) + kLegendRow * static_cast<double>(legend_items) + 10;

    std::ostringstream os;
    os.precision(6);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
       << "</text>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        draw_panel(os, panels[i], kPanelW * static_cast<double>(i % columns),
                   kHeader + kPanelH * static_cast<double>(i / columns));
    }
    const double ly = kHeader + kPanelH * static_cast<double>(rows);
    for (std::size_t i = 0; i < legend_items; ++i) {
        const Line& l = panels.front().lines[i];
        const double y = ly + kLegendRow * static_cast<double>(i) + 8;
        os << "<line x1=\"20\" y1=\"" << y << "\" x2=\"50\" y2=\"" << y << "\" stroke=\"" << colour(i)
           << "\" stroke-width=\"2\"" << (l.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
        os << "<text x=\"56\" y=\"" << y + 4 << "\" font-size=\"11\">" << escape(l.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string mean_curves(const ErrorReport& r) {
    std::vector<Panel> panels;
    for (Channel c : kAllChannels) {
        for (Side s : kBothSides) {
            std::vector<double> truth(kErrorBins, 0.0), cand(kErrorBins, 0.0);
            std::vector<std::size_t> n(kErrorBins, 0);
            for (const ErrorCell& cell : r.cells) {
                if (cell.channel == c && cell.key.side == s) {
                    truth[cell.bin] += cell.truth;
                    cand[cell.bin] += cell.candidate;
                    ++n[cell.bin];
                }
            }
            for (std::size_t b = 0; b < kErrorBins; ++b) {
                const double k = n[b] ? static_cast<double>(n[b]) : std::numeric_limits<double>::quiet_NaN();
                truth[b] /= k;
                cand[b] /= k;
            }
            Panel p;
            p.title = panel_title(c, s);
            p.y_label = "angle (deg)";
            p.lines.push_back({r.truth_source, percent_axis(), truth, false});
            p.lines.push_back({r.candidate_source, percent_axis(), cand, true});
            panels.push_back(std::move(p));
        }
    }
    return small_multiples(panels, 2, "Mean curves: " + r.candidate_source + " vs " + r.truth_source);
}

std::string subject_error_curves(const ErrorReport& r) {
    std::vector<Panel> panels;
    for (Channel c : kAllChannels) {
        for (Side s : kBothSides) {
            Panel p;
            p.title = panel_title(c, s);
            p.y_label = "abs error (deg)";
            for (const SubjectCurve& sc : r.subject_curves) {
                if (sc.channel == c && sc.side == s) {
                    p.lines.push_back({"subject " + sc.subject_id, percent_axis(),
                                       std::vector<double>(sc.mean_abs.begin(), sc.mean_abs.end()), false});
                }
            }
            panels.push_back(std::move(p));
        }
    }
    return small_multiples(panels, 2, "Per-subject absolute error: " + r.candidate_source + " vs " + r.truth_source);
}

} // namespace strideflex::svg
