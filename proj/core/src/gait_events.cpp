#include "strideflex/gait_events.hpp"

#include "strideflex/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace strideflex {
namespace {

std::size_t frames_for(double seconds, double fps) {
    return static_cast<std::size_t>(std::lround(seconds * fps));
}

double mean_hip_x(const TrajectorySet& t, std::size_t f) {
    return 0.5 * (t.at(f, JointId::l_hip).position.x + t.at(f, JointId::r_hip).position.x);
}

} // namespace

void GaitEventConfig::validate() const {
    if (!(window_s > 0.0) || !(gate_s > 0.0) || !(velocity_ratio > 0.0) || !(min_stride_s > 0.0) ||
        !(max_stride_s > min_stride_s)) {
        throw ValidationError("gait event config: parameters must be positive and min_stride_s < max_stride_s");
    }
}

std::vector<std::size_t> detect_foot_strikes(const TrajectorySet& t, Side side, const GaitEventConfig& cfg) {
    cfg.validate();
    if (t.coordinates() != CoordinateFrame::canonical) {
        throw ValidationError("detect_foot_strikes: trajectory must be canonicalized first");
    }
    if (t.missing_count() > 0) {
        throw ValidationError("detect_foot_strikes: trajectory has missing samples, clean it first");
    }
    const std::size_t n = t.frame_count();
    const JointId ankle = joint(side, Segment::ankle);
    const double fps = t.fps();
    const std::size_t half = std::max<std::size_t>(1, frames_for(cfg.window_s, fps) / 2);
    const std::size_t gate = std::max<std::size_t>(1, frames_for(cfg.gate_s, fps));

    const double duration = static_cast<double>(n - 1) / fps;
    const double hip_speed = (mean_hip_x(t, n - 1) - mean_hip_x(t, 0)) / duration;
    auto y = [&](std::size_t f) { return t.at(f, ankle).position.y; };
    auto x = [&](std::size_t f) { return t.at(f, ankle).position.x; };

    std::vector<std::size_t> candidates;
    if (hip_speed > 0.0) {
        for (std::size_t i = 1; i + gate < n; ++i) {
            const std::size_t lo = i >= half ? i - half : 0;
            const std::size_t hi = std::min(n - 1, i + half);
            bool is_min = true;
            // First frame of a plateau wins: strict on the left, non-strict on the right.
            for (std::size_t j = lo; j < i && is_min; ++j) {
                is_min = y(i) < y(j);
            }
            for (std::size_t j = i + 1; j <= hi && is_min; ++j) {
                is_min = y(i) <= y(j);
            }
            if (!is_min) {
                continue;
            }
            const double ankle_speed = (x(i + gate) - x(i)) * fps / static_cast<double>(gate);
            if (ankle_speed < cfg.velocity_ratio * hip_speed) {
                candidates.push_back(i);
            }
        }
    }

    const double min_gap = cfg.min_stride_s * fps;
    std::vector<std::size_t> kept;
    for (std::size_t c : candidates) {
        if (!kept.empty() && static_cast<double>(c - kept.back()) < min_gap) {
            if (y(c) < y(kept.back())) {
                kept.back() = c;
            }
            continue;
        }
        kept.push_back(c);
    }

    const double max_gap = cfg.max_stride_s * fps;
    std::size_t best_begin = 0, best_len = 0;
    for (std::size_t b = 0; b < kept.size();) {
        std::size_t e = b + 1;
        while (e < kept.size() && static_cast<double>(kept[e] - kept[e - 1]) <= max_gap) {
            ++e;
        }
        if (e - b > best_len) {
            best_begin = b;
            best_len = e - b;
        }
        b = e;
    }
    std::vector<std::size_t> strikes(kept.begin() + static_cast<std::ptrdiff_t>(best_begin),
                                     kept.begin() + static_cast<std::ptrdiff_t>(best_begin + best_len));
    if (strikes.size() < 2) {
        throw ValidationError(std::string(name_of(side)) + " side: found " + std::to_string(strikes.size()) +
                              " foot strikes, need at least 2");
    }
    return strikes;
}

FootStrikeList detect_foot_strikes(const TrajectorySet& t, const GaitEventConfig& cfg) {
    FootStrikeList list;
    for (Side s : kBothSides) {
        list[s] = detect_foot_strikes(t, s, cfg);
    }
    return list;
}

std::vector<StrideSegment> segment_strides(std::span<const std::size_t> strikes, Side side, const AngleSeries& angles) {
    if (strikes.size() < 2) {
        throw ValidationError("segment_strides: need at least 2 strikes on the " + std::string(name_of(side)) +
                              " side");
    }
    std::vector<StrideSegment> segments;
    for (std::size_t k = 0; k + 1 < strikes.size(); ++k) {
        const std::size_t a = strikes[k];
        const std::size_t b = strikes[k + 1];
        if (b <= a || b >= angles.frame_count()) {
            throw ValidationError("segment_strides: strikes must be increasing and inside the angle series");
        }
        StrideSegment seg;
        seg.side = side;
        seg.first_frame = a;
        seg.last_frame = b;
        for (Channel c : kAllChannels) {
            auto& out = seg.channels[static_cast<std::size_t>(c)];
            out.reserve(b - a + 1);
            for (std::size_t f = a; f <= b; ++f) {
                out.push_back(value_of(angles.frames[f][side], c));
            }
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

Grid time_normalize(std::span<const double> values) {
    if (values.size() < kGridPoints) {
        throw ValidationError("time_normalize: stride spans " + std::to_string(values.size()) +
                              " frames, need at least 11");
    }
    Grid g{};
    const double last = static_cast<double>(values.size() - 1);
    for (std::size_t k = 0; k < kGridPoints; ++k) {
        const double pos = last * static_cast<double>(k) / 10.0;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        if (lo + 1 >= values.size()) {
            g[k] = values.back();
            continue;
        }
        const double w = pos - static_cast<double>(lo);
        g[k] = w == 0.0 ? values[lo] : values[lo] + w * (values[lo + 1] - values[lo]);
    }
    return g;
}

ChannelGrids time_normalize(const StrideSegment& segment) {
    ChannelGrids g{};
    for (std::size_t c = 0; c < 3; ++c) {
        g[c] = time_normalize(segment.channels[c]);
    }
    return g;
}

StrideSelection stride_selection_from_name(const std::string& name) {
    if (name == "central") {
        return StrideSelection::central;
    }
    if (name == "first") {
        return StrideSelection::first;
    }
    if (name == "last") {
        return StrideSelection::last;
    }
    throw ValidationError("unknown stride selection '" + name + "' (central, first, last)");
}

std::string_view name_of(StrideSelection s) {
    switch (s) {
    case StrideSelection::central:
        return "central";
    case StrideSelection::first:
        return "first";
    case StrideSelection::last:
        return "last";
    }
    return "central";
}

std::vector<std::size_t> select_strides(std::size_t available, StrideSelection policy, std::size_t count) {
    const std::size_t k = std::min(available, count);
    std::size_t start = 0;
    switch (policy) {
    case StrideSelection::first:
        start = 0;
        break;
    case StrideSelection::last:
        start = available - k;
        break;
    case StrideSelection::central:
        start = (available - k) / 2;
        break;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = start + i;
    }
    return idx;
}

StrideSummary summarize_strides(std::span<const StrideSegment> segments, StrideSelection policy, std::size_t count) {
    if (segments.empty()) {
        throw ValidationError("summarize_strides: no stride segments");
    }
    if (count == 0) {
        throw ValidationError("summarize_strides: stride count must be positive");
    }
    StrideSummary s;
    s.key.side = segments.front().side;
    for (std::size_t i : select_strides(segments.size(), policy, count)) {
        s.per_stride.push_back(time_normalize(segments[i]));
        s.stride_frames.emplace_back(segments[i].first_frame, segments[i].last_frame);
    }
    s.n_strides_averaged = s.per_stride.size();
    const double inv = 1.0 / static_cast<double>(s.n_strides_averaged);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < kGridPoints; ++k) {
            double sum = 0.0;
            for (const ChannelGrids& g : s.per_stride) {
                sum += g[c][k];
            }
            s.mean[c][k] = sum * inv;
        }
    }
    return s;
}

std::string StrideSummary::to_json() const {
    nlohmann::json j;
    j["subject_id"] = key.subject_id;
    j["sprint_id"] = key.sprint_id;
    j["side"] = std::string(name_of(key.side));
    j["source"] = source;
    j["n_strides_averaged"] = n_strides_averaged;
    j["percent"] = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    for (Channel c : kAllChannels) {
        j["mean"][std::string(name_of(c))] = mean[static_cast<std::size_t>(c)];
    }
    nlohmann::json strides = nlohmann::json::array();
    for (std::size_t i = 0; i < per_stride.size(); ++i) {
        nlohmann::json st;
        st["first_frame"] = stride_frames[i].first;
        st["last_frame"] = stride_frames[i].second;
        for (Channel c : kAllChannels) {
            st[std::string(name_of(c))] = per_stride[i][static_cast<std::size_t>(c)];
        }
        strides.push_back(st);
    }
    j["strides"] = strides;
    return j.dump(2);
}

void write_stride_csv(std::ostream& out, const StrideSummary& s, int decimals) {
    out << "percent,trunk,hip,knee\n" << std::fixed << std::setprecision(decimals);
    for (std::size_t k = 0; k < kGridPoints; ++k) {
        out << k * 10;
        for (std::size_t c = 0; c < 3; ++c) {
            out << ',' << s.mean[c][k];
        }
        out << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

} // namespace strideflex
