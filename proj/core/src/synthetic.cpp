#include "strideflex/synthetic.hpp"

#include "strideflex/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace strideflex {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LimbPose {
    Vec2 shoulder;
    Vec2 hip;
    Vec2 knee;
    Vec2 ankle;
};

double limb_phase(const GaitModel& m, Side side, double t) {
    return m.start_phase + m.stride_hz * t + (side == Side::right ? 0.5 : 0.0);
}

Vec2 root_position(const GaitModel& m, double t) {
    const double p = m.start_phase + m.stride_hz * t;
    return {m.start_x + m.forward_speed * t, m.hip_height - m.vertical_oscillation * std::cos(2.0 * kTwoPi * p)};
}

// Segment directions are written as a forward rotation from straight down
// (thighs, shanks) or from straight up (trunk), matching the flexion-positive
// conventions: thigh direction = hip angle - trunk lean, shank direction =
// thigh direction - knee angle.
LimbPose pose(const GaitModel& m, Side side, double t) {
    const double p = limb_phase(m, side, t);
    const double lean = deg_to_rad(m.trunk(p));
    const double thigh_dir = deg_to_rad(m.hip(p)) - lean;
    const double shank_dir = thigh_dir - deg_to_rad(m.knee(p));
    LimbPose lp;
    lp.hip = root_position(m, t);
    lp.shoulder = lp.hip + Vec2{std::sin(lean), std::cos(lean)} * m.trunk_length;
    lp.knee = lp.hip + Vec2{std::sin(thigh_dir), -std::cos(thigh_dir)} * m.thigh_length;
    lp.ankle = lp.knee + Vec2{std::sin(shank_dir), -std::cos(shank_dir)} * m.shank_length;
    return lp;
}

double ankle_height(const GaitModel& m, Side side, double t) { return pose(m, side, t).ankle.y; }

// Time of the lowest ankle point in one stride cycle centred on phase k.
double strike_time(const GaitModel& m, Side side, double k) {
    const double offset = m.start_phase + (side == Side::right ? 0.5 : 0.0);
    const double t_lo = (k - 0.5 - offset) / m.stride_hz;
    const double t_hi = (k + 0.5 - offset) / m.stride_hz;
    constexpr int kSamples = 400;
    double best_t = t_lo;
    double best_y = std::numeric_limits<double>::infinity();
    double worst_y = -best_y;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / kSamples;
        const double y = ankle_height(m, side, t);
        worst_y = std::max(worst_y, y);
        if (y < best_y) {
            best_y = y;
            best_t = t;
        }
    }
    if (worst_y - best_y < 1e-9) {
        return (k - offset) / m.stride_hz; // flat ankle path: strike at the cycle origin
    }
    // Golden-section refinement around the best sample.
    const double step = (t_hi - t_lo) / kSamples;
    double a = best_t - step;
    double b = best_t + step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (ankle_height(m, side, c) < ankle_height(m, side, d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return 0.5 * (a + b);
}

// A plausible stride has one ankle-height minimum per cycle. Returns the
// phase of that minimum, or nothing when the ankle path dips more than once.
std::optional<double> single_ankle_minimum(const GaitModel& m) {
    constexpr int kSamples = 720;
    std::array<double, kSamples> y{};
    for (int i = 0; i < kSamples; ++i) {
        const double p = static_cast<double>(i) / kSamples;
        y[static_cast<std::size_t>(i)] = pose(m, Side::left, (p - m.start_phase) / m.stride_hz).ankle.y;
    }
    int minima = 0;
    double phase = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double prev = y[static_cast<std::size_t>((i + kSamples - 1) % kSamples)];
        const double next = y[static_cast<std::size_t>((i + 1) % kSamples)];
        const double here = y[static_cast<std::size_t>(i)];
        if (here < prev && here <= next) {
            ++minima;
            phase = static_cast<double>(i) / kSamples;
        }
    }
    if (minima != 1) {
        return std::nullopt;
    }
    return phase;
}

// Root speed that leaves the lowest foot stationary at the ankle minimum.
double planted_speed(const GaitModel& m, double phase) {
    constexpr double kStep = 1e-4;
    auto rel_x = [&](double p) {
        const LimbPose lp = pose(m, Side::left, (p - m.start_phase) / m.stride_hz);
        return lp.ankle.x - lp.hip.x;
    };
    return -m.stride_hz * (rel_x(phase + kStep) - rel_x(phase - kStep)) / (2.0 * kStep);
}

} // namespace

double FourierCurve::operator()(double phase) const {
    double v = mean;
    for (std::size_t k = 0; k < 4; ++k) {
        const double w = kTwoPi * static_cast<double>(k + 1) * phase;
        v += cos_coef[k] * std::cos(w) + sin_coef[k] * std::sin(w);
    }
    return v;
}

std::size_t GaitModel::frame_count() const { return static_cast<std::size_t>(std::lround(duration_s * fps)) + 1; }

void GaitModel::validate() const {
    if (!(stride_hz > 0.0) || !(fps > 0.0) || !(duration_s > 0.0) || !(trunk_length > 0.0) ||
        !(thigh_length > 0.0) || !(shank_length > 0.0) || !(forward_speed >= 0.0)) {
        throw ValidationError("gait model: stride_hz, fps, duration and segment lengths must be positive");
    }
    if (frame_count() < 2) {
        throw ValidationError("gait model: duration shorter than two frames");
    }
    for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        const double h = hip(p);
        const double k = knee(p);
        if (h < -30.0 || h > 110.0) {
            throw ValidationError("gait model: hip angle " + std::to_string(h) + " outside [-30, 110]");
        }
        if (k < -5.0 || k > 140.0) {
            throw ValidationError("gait model: knee angle " + std::to_string(k) + " outside [-5, 140]");
        }
        if (std::abs(trunk(p)) >= 80.0) {
            throw ValidationError("gait model: trunk lean beyond 80 degrees");
        }
    }
}

GaitModel default_gait_model() {
    GaitModel m;
    m.trunk.mean = 10.0;
    m.trunk.cos_coef = {0.0, 3.0, 0.0, 0.0};
    m.hip.mean = 36.234;
    m.hip.cos_coef = {-9.596, 18.341, -2.463, -1.938};
    m.hip.sin_coef = {-29.262, 7.151, -2.831, 1.188};
    m.knee.mean = 52.826;
    m.knee.cos_coef = {-19.614, 30.575, -4.602, -4.080};
    m.knee.sin_coef = {2.549, -1.692, -0.486, 0.649};
    const double leg = m.thigh_length + m.shank_length;
    m.hip_height = 0.905 * leg;
    m.vertical_oscillation = 0.025 * leg;
    m.forward_speed = 418.06;
    return m;
}

GaitModel seeded_gait_model(std::uint64_t seed) {
    const GaitModel base = default_gait_model();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        GaitModel m = base;
        m.seed = seed;
        m.stride_hz = 1.25 * (1.0 + 0.2 * u(rng));
        const double length_scale = 1.0 + 0.1 * u(rng);
        m.thigh_length = base.thigh_length * length_scale * (1.0 + 0.05 * u(rng));
        m.shank_length = base.shank_length * length_scale * (1.0 + 0.05 * u(rng));
        m.trunk_length = base.trunk_length * length_scale * (1.0 + 0.05 * u(rng));
        auto jitter = [&](FourierCurve& c, double mean_shift) {
            c.mean += mean_shift * u(rng);
            for (std::size_t k = 0; k < 4; ++k) {
                c.cos_coef[k] *= 1.0 + 0.15 * u(rng);
                c.sin_coef[k] *= 1.0 + 0.15 * u(rng);
            }
        };
        jitter(m.trunk, 4.0);
        m.trunk.cos_coef[0] = 1.0 * u(rng);
        jitter(m.hip, 3.0);
        jitter(m.knee, 3.0);
        const double leg = m.thigh_length + m.shank_length;
        const double base_leg = base.thigh_length + base.shank_length;
        m.hip_height = base.hip_height * leg / base_leg;
        m.vertical_oscillation = base.vertical_oscillation * leg / base_leg;
        try {
            m.validate();
        } catch (const ValidationError&) {
            continue;
        }
        const std::optional<double> strike_phase = single_ankle_minimum(m);
        if (!strike_phase) {
            continue;
        }
        m.forward_speed = planted_speed(m, *strike_phase);
        if (m.forward_speed > 0.0) {
            return m;
        }
    }
    throw ValidationError("seeded_gait_model: no valid model found");
}

GeneratedSprint generate(const GaitModel& model, const CaptureMeta& meta_template) {
    model.validate();
    CaptureMeta meta = meta_template;
    meta.fps = model.fps;
    if (meta.source.empty()) {
        meta.source = "synthetic";
    }
    const std::size_t n = model.frame_count();
    std::vector<Frame> frames(n);
    AngleSeries truth;
    truth.fps = model.fps;
    truth.source = meta;
    truth.frames.resize(n);
    for (std::size_t f = 0; f < n; ++f) {
        const double t = static_cast<double>(f) / model.fps;
        for (Side side : kBothSides) {
            const LimbPose lp = pose(model, side, t);
            frames[f][index_of(joint(side, Segment::shoulder))].position = lp.shoulder;
            frames[f][index_of(joint(side, Segment::hip))].position = lp.hip;
            frames[f][index_of(joint(side, Segment::knee))].position = lp.knee;
            frames[f][index_of(joint(side, Segment::ankle))].position = lp.ankle;
            const double p = limb_phase(model, side, t);
            AngleSample& a = truth.frames[f][side];
            a.trunk_deg = model.trunk(p);
            a.hip_deg = model.hip(p);
            a.knee_deg = model.knee(p);
            a.trunk_from_horizontal_deg = 90.0 - a.trunk_deg;
        }
    }

    FootStrikeList strikes;
    const double duration = static_cast<double>(n - 1) / model.fps;
    for (Side side : kBothSides) {
        const double offset = model.start_phase + (side == Side::right ? 0.5 : 0.0);
        const double k_first = std::floor(offset) - 1.0;
        const double k_last = std::ceil(offset + model.stride_hz * duration) + 1.0;
        for (double k = k_first; k <= k_last; k += 1.0) {
            const double ts = strike_time(model, side, k);
            if (ts <= 0.0 || ts >= duration) {
                continue;
            }
            const auto frame = static_cast<std::size_t>(std::lround(ts * model.fps));
            if (frame >= 1 && frame + 1 < n) {
                strikes[side].push_back(frame);
            }
        }
    }
    return {TrajectorySet(meta, std::move(frames), CoordinateFrame::canonical, Direction::positive_x),
            std::move(truth), std::move(strikes)};
}

TrajectorySet to_image_coordinates(const TrajectorySet& canonical, bool right_to_left) {
    if (canonical.coordinates() != CoordinateFrame::canonical) {
        throw ValidationError("to_image_coordinates: input is not canonical");
    }
    const CaptureMeta& meta = canonical.meta();
    std::vector<Frame> frames = canonical.frames();
    for (Frame& fr : frames) {
        for (KeypointSample& s : fr) {
            if (s.missing) {
                continue;
            }
            s.position.y = meta.image_height - s.position.y;
            if (right_to_left) {
                s.position.x = meta.image_width - s.position.x;
            }
        }
    }
    return TrajectorySet(meta, std::move(frames), CoordinateFrame::image);
}

void NoiseSpec::validate() const {
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!std::all_of(loss_rate.begin(), loss_rate.end(), rate_ok) || !rate_ok(misallocation_rate) ||
        !(jitter_sd >= 0.0) || !(displacement_min >= 0.0) || !(displacement_max >= displacement_min)) {
        throw ValidationError("noise spec: rates must lie in [0,1] and displacements be ordered");
    }
    for (const InjectedSwap& w : swap_windows) {
        if (w.last < w.first) {
            throw ValidationError("noise spec: swap window ends before it starts");
        }
    }
}

NoisyTrajectory inject_noise(const TrajectorySet& t, const NoiseSpec& spec) {
    spec.validate();
    const std::size_t n = t.frame_count();
    std::vector<Frame> frames = t.frames();
    InjectionLog log;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<InjectedSwap> swaps = spec.swap_windows;
    if (spec.random_swaps_per_pair > 0 && n > spec.random_swap_length + 2) {
        std::uniform_int_distribution<std::size_t> start(1, n - spec.random_swap_length - 1);
        for (Segment g : kAllSegments) {
            for (std::size_t k = 0; k < spec.random_swaps_per_pair; ++k) {
                const std::size_t a = start(rng);
                swaps.push_back({g, a, a + spec.random_swap_length - 1});
            }
        }
    }
    for (const InjectedSwap& w : swaps) {
        const std::size_t li = index_of(joint(Side::left, w.segment));
        const std::size_t ri = index_of(joint(Side::right, w.segment));
        for (std::size_t f = w.first; f <= std::min(w.last, n - 1); ++f) {
            std::swap(frames[f][li], frames[f][ri]);
            log.events.push_back({f, joint(Side::left, w.segment), InjectedKind::swapped, {}});
            log.events.push_back({f, joint(Side::right, w.segment), InjectedKind::swapped, {}});
        }
        log.swaps.push_back(w);
    }

    if (spec.misallocation_rate > 0.0) {
        for (std::size_t f = 0; f < n; ++f) {
            for (JointId j : kAllJoints) {
                if (unit(rng) >= spec.misallocation_rate) {
                    continue;
                }
                KeypointSample& s = frames[f][index_of(j)];
                const double mag = spec.displacement_min + (spec.displacement_max - spec.displacement_min) * unit(rng);
                const double dir = kTwoPi * unit(rng);
                const Vec2 d{mag * std::cos(dir), mag * std::sin(dir)};
                if (!s.missing) {
                    s.position = s.position + d;
                    log.events.push_back({f, j, InjectedKind::misallocated, d});
                }
            }
        }
    }

    if (spec.jitter_sd > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.jitter_sd);
        for (Frame& fr : frames) {
            for (KeypointSample& s : fr) {
                if (!s.missing) {
                    s.position = s.position + Vec2{noise(rng), noise(rng)};
                }
            }
        }
    }

    for (JointId j : kAllJoints) {
        const double rate = spec.loss_rate[index_of(j)];
        if (rate <= 0.0) {
            continue;
        }
        for (std::size_t f = 0; f < n; ++f) {
            if (rate >= 1.0 || unit(rng) < rate) {
                KeypointSample& s = frames[f][index_of(j)];
                s.missing = true;
                s.position = {};
                log.events.push_back({f, j, InjectedKind::lost, {}});
            }
        }
    }
    return {t.with_frames(std::move(frames)), std::move(log)};
}

double mean_position_error(const TrajectorySet& a, const TrajectorySet& truth) {
    if (a.frame_count() != truth.frame_count()) {
        throw ValidationError("mean_position_error: frame counts differ");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < a.frame_count(); ++f) {
        for (JointId j : kAllJoints) {
            const KeypointSample& s = a.at(f, j);
            if (s.missing) {
                continue;
            }
            sum += distance(s.position, truth.at(f, j).position);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace strideflex
