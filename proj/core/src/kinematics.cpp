#include "strideflex/kinematics.hpp"

#include "strideflex/error.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace strideflex {
namespace {

void require_distinct(Vec2 a, Vec2 b, const char* what) {
    if (a == b) {
        throw ValidationError(std::string("coincident points: ") + what);
    }
}

} // namespace

double trunk_angle_from_horizontal(Vec2 shoulder, Vec2 hip) {
    require_distinct(shoulder, hip, "shoulder and hip");
    const Vec2 trunk = shoulder - hip;
    return rad_to_deg(std::atan2(trunk.y, trunk.x));
}

double trunk_angle(Vec2 shoulder, Vec2 hip) {
    return wrap_deg(90.0 - trunk_angle_from_horizontal(shoulder, hip));
}

double hip_angle(Vec2 shoulder, Vec2 hip, Vec2 knee) {
    require_distinct(shoulder, hip, "shoulder and hip");
    require_distinct(hip, knee, "hip and knee");
    const Vec2 trunk_down = hip - shoulder;
    return signed_angle_deg(trunk_down, knee - hip);
}

double knee_angle(Vec2 hip, Vec2 knee, Vec2 ankle) {
    require_distinct(hip, knee, "hip and knee");
    require_distinct(knee, ankle, "knee and ankle");
    // Counter-clockwise swings a downward segment forward, so flexion (ankle
    // behind the thigh line) is a clockwise rotation.
    const double a = -signed_angle_deg(knee - hip, ankle - knee);
    return a == -180.0 ? 180.0 : a;
}

std::string_view name_of(Channel c) {
    switch (c) {
    case Channel::trunk:
        return "trunk";
    case Channel::hip:
        return "hip";
    case Channel::knee:
        return "knee";
    }
    return "trunk";
}

double value_of(const AngleSample& s, Channel c) {
    switch (c) {
    case Channel::trunk:
        return s.trunk_deg;
    case Channel::hip:
        return s.hip_deg;
    case Channel::knee:
        return s.knee_deg;
    }
    return 0.0;
}

std::vector<double> AngleSeries::channel(Side s, Channel c) const {
    std::vector<double> v;
    v.reserve(frames.size());
    for (const AngleFrame& fr : frames) {
        v.push_back(value_of(fr[s], c));
    }
    return v;
}

AngleSeries compute_angles(const TrajectorySet& t) {
    if (t.coordinates() != CoordinateFrame::canonical) {
        throw ValidationError("compute_angles: trajectory must be canonicalized first");
    }
    AngleSeries out;
    out.fps = t.fps();
    out.source = t.meta();
    out.frames.resize(t.frame_count());
    for (std::size_t f = 0; f < t.frame_count(); ++f) {
        for (Side side : kBothSides) {
            const KeypointSample& sh = t.at(f, joint(side, Segment::shoulder));
            const KeypointSample& hp = t.at(f, joint(side, Segment::hip));
            const KeypointSample& kn = t.at(f, joint(side, Segment::knee));
            const KeypointSample& an = t.at(f, joint(side, Segment::ankle));
            const std::string ctx = "frame " + std::to_string(f) + ", " + std::string(name_of(side)) + " side: ";
            for (Segment seg : kAllSegments) {
                if (t.at(f, joint(side, seg)).missing) {
                    throw ValidationError(ctx + "missing " + std::string(name_of(joint(side, seg))) +
                                          " sample, clean the trajectory first");
                }
            }
            try {
                AngleSample& a = out.frames[f][side];
                a.trunk_from_horizontal_deg = trunk_angle_from_horizontal(sh.position, hp.position);
                a.trunk_deg = trunk_angle(sh.position, hp.position);
                a.hip_deg = hip_angle(sh.position, hp.position, kn.position);
                a.knee_deg = knee_angle(hp.position, kn.position, an.position);
            } catch (const ValidationError& e) {
                throw ValidationError(ctx + e.what());
            }
        }
    }
    return out;
}

void write_angle_csv(std::ostream& out, const AngleSeries& a, int decimals) {
    out << "frame,time_s,left_trunk,left_hip,left_knee,right_trunk,right_hip,right_knee,"
           "left_trunk_from_horizontal,right_trunk_from_horizontal\n";
    out << std::fixed << std::setprecision(decimals);
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        const AngleFrame& fr = a.frames[f];
        out << f << ',' << static_cast<double>(f) / a.fps;
        for (Side s : kBothSides) {
            out << ',' << fr[s].trunk_deg << ',' << fr[s].hip_deg << ',' << fr[s].knee_deg;
        }
        out << ',' << fr[Side::left].trunk_from_horizontal_deg << ',' << fr[Side::right].trunk_from_horizontal_deg
            << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

AngleSeries parse_angle_csv(std::istream& in, double fps) {
    AngleSeries a;
    a.fps = fps;
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty angle file");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double d = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
            if (ec != std::errc()) {
                throw ValidationError("angle csv line " + std::to_string(line_no) + ": malformed number");
            }
            v.push_back(d);
        }
        if (v.size() != 10) {
            throw ValidationError("angle csv line " + std::to_string(line_no) + ": expected 10 cells");
        }
        AngleFrame fr;
        fr[Side::left] = {v[2], v[3], v[4], v[8]};
        fr[Side::right] = {v[5], v[6], v[7], v[9]};
        a.frames.push_back(fr);
    }
    return a;
}

} // namespace strideflex
