#include "strideflex/keypoint_io.hpp"

#include "strideflex/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

namespace strideflex {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(s));
    }
    return v;
}

long parse_frame(std::string_view s) {
    s = trim(s);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(std::string(s));
    }
    return v;
}

enum class Field { x, y, conf };

struct ColumnMap {
    // Per joint, the cell index of x, y, conf.
    std::array<std::array<std::size_t, 3>, kJointCount> cell{};
    std::size_t width = 0;
};

ColumnMap parse_header(std::string_view line) {
    const auto cells = split_commas(line);
    if (cells.size() < 2 || trim(cells[0]) != "frame" || trim(cells[1]) != "time_s") {
        throw ValidationError("line 1: header must start with 'frame,time_s'");
    }
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    ColumnMap map;
    for (auto& per_joint : map.cell) {
        per_joint.fill(unset);
    }
    for (std::size_t c = 2; c < cells.size(); ++c) {
        const std::string_view name = trim(cells[c]);
        const std::size_t us = name.rfind('_');
        if (us == std::string_view::npos) {
            throw ValidationError("line 1: unknown column '" + std::string(name) + "'");
        }
        const auto j = joint_from_name(name.substr(0, us));
        const std::string_view suffix = name.substr(us + 1);
        std::optional<Field> field;
        if (suffix == "x") {
            field = Field::x;
        } else if (suffix == "y") {
            field = Field::y;
        } else if (suffix == "conf") {
            field = Field::conf;
        }
        if (!j || !field) {
            throw ValidationError("line 1: unknown joint column '" + std::string(name) + "'");
        }
        std::size_t& slot = map.cell[index_of(*j)][static_cast<std::size_t>(*field)];
        if (slot != unset) {
            throw ValidationError("line 1: duplicate column '" + std::string(name) + "'");
        }
        slot = c;
    }
    for (JointId j : kAllJoints) {
        for (std::size_t f = 0; f < 3; ++f) {
            if (map.cell[index_of(j)][f] == unset) {
                throw ValidationError("line 1: missing columns for joint " + std::string(name_of(j)));
            }
        }
    }
    map.width = cells.size();
    return map;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

std::string keypoint_csv_header() {
    std::string h = "frame,time_s";
    for (JointId j : kAllJoints) {
        const std::string n(name_of(j));
        h += "," + n + "_x," + n + "_y," + n + "_conf";
    }
    return h;
}

TrajectorySet parse_keypoint_csv(std::istream& in, const CaptureMeta& meta) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty keypoint file");
    }
    const ColumnMap map = parse_header(line);

    std::vector<Frame> frames;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto cells = split_commas(line);
        if (cells.size() != map.width) {
            throw ValidationError(where + "expected " + std::to_string(map.width) + " cells, got " +
                                  std::to_string(cells.size()));
        }
        long frame_index = 0;
        try {
            frame_index = parse_frame(cells[0]);
            (void)parse_double(cells[1]);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(where + "malformed number '" + e.what() + "'");
        }
        const long expected = static_cast<long>(frames.size());
        if (frame_index < expected) {
            throw ValidationError(where + (frame_index == expected - 1 ? "duplicate frame index "
                                                                       : "non-monotonic frame index ") +
                                  std::to_string(frame_index));
        }
        if (frame_index > expected) {
            throw ValidationError(where + "frame index gap: expected " + std::to_string(expected) +
                                  ", got " + std::to_string(frame_index));
        }

        Frame fr{};
        for (JointId j : kAllJoints) {
            const auto& col = map.cell[index_of(j)];
            KeypointSample s;
            try {
                const auto x = parse_double(cells[col[0]]);
                const auto y = parse_double(cells[col[1]]);
                s.confidence = parse_double(cells[col[2]]);
                if (x.has_value() != y.has_value()) {
                    throw ValidationError(where + std::string(name_of(j)) +
                                          ": x and y must be both present or both empty");
                }
                if (x) {
                    s.position = {*x, *y};
                } else {
                    s.missing = true;
                }
            } catch (const std::invalid_argument& e) {
                throw ValidationError(where + std::string(name_of(j)) + ": malformed number '" +
                                      e.what() + "'");
            }
            if (s.confidence && !(*s.confidence >= 0.0 && *s.confidence <= 1.0)) {
                throw ValidationError(where + std::string(name_of(j)) + ": confidence outside [0,1]");
            }
            fr[index_of(j)] = s;
        }
        frames.push_back(fr);
    }
    return TrajectorySet(meta, std::move(frames), CoordinateFrame::image);
}

TrajectorySet load_keypoint_csv(const std::filesystem::path& path, const CaptureMeta& meta) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open keypoint file " + path.string());
    }
    try {
        return parse_keypoint_csv(in, meta);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_keypoint_csv(std::ostream& out, const TrajectorySet& t) {
    out << keypoint_csv_header() << '\n';
    for (std::size_t f = 0; f < t.frame_count(); ++f) {
        out << f << ',' << format_number(static_cast<double>(f) / t.fps());
        for (JointId j : kAllJoints) {
            const KeypointSample& s = t.at(f, j);
            out << ',';
            if (!s.missing) {
                out << format_number(s.position.x) << ',' << format_number(s.position.y);
            } else {
                out << ',';
            }
            out << ',';
            if (s.confidence) {
                out << format_number(*s.confidence);
            }
        }
        out << '\n';
    }
}

void save_keypoint_csv(const std::filesystem::path& path, const TrajectorySet& t) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write keypoint file " + path.string());
    }
    write_keypoint_csv(out, t);
}

TrajectorySet canonicalize(const TrajectorySet& t) {
    if (t.coordinates() == CoordinateFrame::canonical) {
        return t;
    }
    const CaptureMeta& meta = t.meta();

    // Least-squares slope of the mean hip x over frame index.
    double sum_f = 0.0, sum_x = 0.0, sum_ff = 0.0, sum_fx = 0.0;
    std::size_t n = 0;
    for (std::size_t f = 0; f < t.frame_count(); ++f) {
        const KeypointSample& l = t.at(f, JointId::l_hip);
        const KeypointSample& r = t.at(f, JointId::r_hip);
        double x = 0.0;
        if (!l.missing && !r.missing) {
            x = 0.5 * (l.position.x + r.position.x);
        } else if (!l.missing) {
            x = l.position.x;
        } else if (!r.missing) {
            x = r.position.x;
        } else {
            continue;
        }
        const double fd = static_cast<double>(f);
        sum_f += fd;
        sum_x += x;
        sum_ff += fd * fd;
        sum_fx += fd * x;
        ++n;
    }
    double displacement = 0.0;
    if (n >= 2) {
        const double nd = static_cast<double>(n);
        const double var = sum_ff - sum_f * sum_f / nd;
        if (var > 0.0) {
            const double slope = (sum_fx - sum_f * sum_x / nd) / var;
            displacement = slope * static_cast<double>(t.frame_count() - 1);
        }
    }
    if (!(std::abs(displacement) >= 0.01 * meta.image_width)) {
        throw ValidationError("cannot determine running direction: net hip displacement " +
                              std::to_string(displacement) + " px is below 1% of the image width");
    }
    const bool mirror = displacement < 0.0;

    std::vector<Frame> frames = t.frames();
    for (Frame& fr : frames) {
        for (KeypointSample& s : fr) {
            if (s.missing) {
                continue;
            }
            s.position.y = meta.image_height - s.position.y;
            if (mirror) {
                s.position.x = meta.image_width - s.position.x;
            }
        }
    }
    return TrajectorySet(meta, std::move(frames), CoordinateFrame::canonical,
                         mirror ? Direction::negative_x : Direction::positive_x);
}

MaskResult mask_low_confidence(const TrajectorySet& t, double min_conf) {
    if (!(min_conf >= 0.0 && min_conf <= 1.0)) {
        throw ValidationError("min_conf must lie in [0,1]");
    }
    std::vector<Frame> frames = t.frames();
    std::size_t masked = 0;
    for (Frame& fr : frames) {
        for (KeypointSample& s : fr) {
            if (!s.missing && s.confidence && *s.confidence < min_conf) {
                s.missing = true;
                s.position = {};
                ++masked;
            }
        }
    }
    return {t.with_frames(std::move(frames)), masked};
}

} // namespace strideflex
