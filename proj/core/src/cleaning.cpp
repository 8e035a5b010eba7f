#include "strideflex/cleaning.hpp"

#include "strideflex/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <set>

namespace strideflex {
namespace {

constexpr double kDefaultEpsilonFraction = 0.005;
constexpr double kDefaultCVarianceFactor = 10.0;
constexpr double kDefaultBandwidthPerFps = 0.08;
constexpr double kMadToSigma = 1.4826;

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

std::size_t present_count(std::span<const std::optional<double>> s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](const auto& v) { return v.has_value(); }));
}

void set_axis(KeypointSample& s, Axis axis, double v) {
    (axis == Axis::x ? s.position.x : s.position.y) = v;
}

std::string where(JointId j) { return std::string(name_of(j)); }

void require_recoverable(std::span<const std::optional<double>> s, JointId j, const CleaningConfig& cfg) {
    const std::size_t n = present_count(s);
    const double coverage = s.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(s.size());
    if (n < cfg.min_samples || coverage < cfg.min_coverage) {
        throw ValidationError(where(j) + ": unrecoverable, only " + std::to_string(n) + " of " +
                              std::to_string(s.size()) + " samples present");
    }
}

struct AxisFit {
    SeriesCurve curve;
    std::vector<std::size_t> outliers;
};

AxisFit fit_and_detect(const Series& s, double fps, const CleaningConfig& cfg) {
    AxisFit af{fit_svr_curve(s, fps, cfg), {}};
    af.outliers = detect_outliers(s, af.curve, cfg);
    return af;
}

} // namespace

Series extract_series(const TrajectorySet& t, JointId j, Axis axis) {
    Series s(t.frame_count());
    for (std::size_t f = 0; f < t.frame_count(); ++f) {
        const KeypointSample& k = t.at(f, j);
        if (!k.missing) {
            s[f] = axis == Axis::x ? k.position.x : k.position.y;
        }
    }
    return s;
}

void CleaningConfig::validate() const {
    auto positive = [](const std::optional<double>& v) { return !v || (*v > 0.0 && std::isfinite(*v)); };
    if (!positive(svr_epsilon) || !positive(svr_c) || !positive(kernel_bandwidth) || !(outlier_k > 0.0) ||
        swap_window < 1 || !(min_coverage >= 0.0 && min_coverage <= 1.0) ||
        min_samples < 2) {
        throw ValidationError("cleaning config: svr_epsilon, svr_c, kernel_bandwidth, outlier_k and "
                              "swap_window must be strictly positive, min_coverage in [0, 1], "
                              "min_samples at least 2");
    }
}

double SeriesCurve::operator()(double frame) const {
    const double trend = intercept_ + slope_ * frame;
    if (!model_) {
        return trend;
    }
    return trend + scale_ * (*model_)(frame);
}

SeriesCurve fit_svr_curve(std::span<const std::optional<double>> series, double fps, const CleaningConfig& cfg) {
    cfg.validate();
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t f = 0; f < series.size(); ++f) {
        if (series[f]) {
            x.push_back(static_cast<double>(f));
            y.push_back(*series[f]);
        }
    }
    if (x.size() < cfg.min_samples) {
        throw ValidationError("svr fit: need at least " + std::to_string(cfg.min_samples) +
                              " present samples, got " + std::to_string(x.size()));
    }

    SeriesCurve curve;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    curve.slope_ = sxx > 0.0 ? sxy / sxx : 0.0;
    curve.intercept_ = my - curve.slope_ * mx;

    std::vector<double> r(y.size());
    double ss = 0.0, rmin = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        r[i] = y[i] - (curve.intercept_ + curve.slope_ * x[i]);
        ss += r[i] * r[i];
    }
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    rmin = *lo;
    rmax = *hi;
    const double variance = ss / n;
    const double sd = std::sqrt(variance);
    const double magnitude = std::max({std::abs(my), std::abs(curve.slope_) * n, 1.0});
    if (!(sd > 1e-12 * magnitude)) {
        // Exactly linear (or constant) data: the trend is the fit.
        curve.epsilon_ = cfg.svr_epsilon.value_or(0.0);
        return curve;
    }

    const double epsilon = cfg.svr_epsilon.value_or(kDefaultEpsilonFraction * (rmax - rmin));
    const double c = cfg.svr_c.value_or(kDefaultCVarianceFactor * variance);
    const double bandwidth = cfg.kernel_bandwidth.value_or(kDefaultBandwidthPerFps * fps);

    // Standardize so the solver tolerance is scale free. The dual coefficients
    // scale with the data, so the box constraint does too.
    for (double& v : r) {
        v /= sd;
    }
    SvrParams params;
    params.epsilon = epsilon / sd;
    params.c = c / sd;
    params.bandwidth = bandwidth;
    curve.model_ = SvrModel::fit(x, r, params);
    curve.scale_ = sd;
    curve.epsilon_ = epsilon;
    return curve;
}

double robust_residual_scale(std::span<const std::optional<double>> series, const SeriesCurve& curve) {
    std::vector<double> abs_res;
    for (std::size_t f = 0; f < series.size(); ++f) {
        if (series[f]) {
            abs_res.push_back(std::abs(*series[f] - curve(static_cast<double>(f))));
        }
    }
    return kMadToSigma * median(std::move(abs_res));
}

std::vector<std::size_t> detect_outliers(std::span<const std::optional<double>> series, const SeriesCurve& curve,
                                         const CleaningConfig& cfg) {
    const double threshold = std::max(cfg.outlier_k * robust_residual_scale(series, curve), curve.epsilon());
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < series.size(); ++f) {
        if (series[f] && std::abs(*series[f] - curve(static_cast<double>(f))) > threshold) {
            out.push_back(f);
        }
    }
    return out;
}

std::string_view name_of(SampleClass c) {
    switch (c) {
    case SampleClass::clean:
        return "clean";
    case SampleClass::lost:
        return "lost";
    case SampleClass::swapped:
        return "swapped";
    case SampleClass::misallocated:
        return "misallocated";
    }
    return "clean";
}

namespace {

struct Labeling {
    std::vector<std::size_t> frames; ///< frames where both sides are present
    std::vector<bool> swapped;       ///< relabel flag per entry of frames
};

Vec2 assigned(const Frame& fr, std::size_t li, std::size_t ri, bool swap, Side side) {
    const bool take_left = (side == Side::left) != swap;
    return fr[take_left ? li : ri].position;
}

// Change of velocity per frame at the middle of three (possibly unevenly spaced) frames.
double bend(Vec2 a, Vec2 b, Vec2 c, double dab, double dbc) {
    return norm((c - b) / dbc - (b - a) / dab);
}

// Minimum-cost keep/relabel sequence over the frames where both sides are
// present: the cost is the summed change of velocity of both relabeled
// tracks plus a penalty per label switch. A left/right confusion makes both
// tracks jump by the pair distance twice, while a genuine crossing is smooth
// under the identity labeling.
Labeling continuity_labeling(const std::vector<Frame>& frames, std::size_t li, std::size_t ri,
                             const std::vector<bool>& excluded) {
    Labeling lab;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (!frames[f][li].missing && !frames[f][ri].missing && !excluded[f]) {
            lab.frames.push_back(f);
        }
    }
    const std::size_t m = lab.frames.size();
    lab.swapped.assign(m, false);
    if (m < 3) {
        return lab;
    }
    auto step_cost = [&](std::size_t k, bool o, bool p, bool q) {
        const Frame& fa = frames[lab.frames[k - 2]];
        const Frame& fb = frames[lab.frames[k - 1]];
        const Frame& fc = frames[lab.frames[k]];
        const double dab = static_cast<double>(lab.frames[k - 1] - lab.frames[k - 2]);
        const double dbc = static_cast<double>(lab.frames[k] - lab.frames[k - 1]);
        double cost = 0.0;
        for (Side side : kBothSides) {
            cost += bend(assigned(fa, li, ri, o, side), assigned(fb, li, ri, p, side), assigned(fc, li, ri, q, side), dab,
                         dbc);
        }
        return cost;
    };

    // The switch penalty is a few times the typical cost of the identity path,
    // so tracker jitter alone never pays for a relabeling.
    std::vector<double> natural;
    natural.reserve(m);
    for (std::size_t k = 2; k < m; ++k) {
        natural.push_back(step_cost(k, false, false, false));
    }
    const double penalty = std::max(4.0 * median(natural), 1e-9);

    // dp over (previous label, current label); index = 2 * prev + cur.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 4>> dp(m, {kInf, kInf, kInf, kInf});
    std::vector<std::array<int, 4>> back(m, {-1, -1, -1, -1});
    for (int o = 0; o < 2; ++o) {
        for (int p = 0; p < 2; ++p) {
            dp[1][2 * o + p] = o != p ? penalty : 0.0;
        }
    }
    for (std::size_t k = 2; k < m; ++k) {
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                for (int o = 0; o < 2; ++o) {
                    const double prev = dp[k - 1][2 * o + p];
                    if (prev == kInf) {
                        continue;
                    }
                    const double v = prev + step_cost(k, o != 0, p != 0, q != 0) + (p != q ? penalty : 0.0);
                    if (v < dp[k][2 * p + q]) {
                        dp[k][2 * p + q] = v;
                        back[k][2 * p + q] = o;
                    }
                }
            }
        }
    }
    int state = static_cast<int>(std::min_element(dp[m - 1].begin(), dp[m - 1].end()) - dp[m - 1].begin());
    for (std::size_t k = m - 1; k >= 1; --k) {
        const int p = state / 2;
        const int q = state % 2;
        lab.swapped[k] = q != 0;
        if (k == 1) {
            lab.swapped[0] = p != 0;
            break;
        }
        state = 2 * back[k][state] + p;
    }
    // Relabeling every frame costs nothing, so the majority labeling is taken as correct.
    const auto relabeled = static_cast<std::size_t>(std::count(lab.swapped.begin(), lab.swapped.end(), true));
    if (2 * relabeled > m) {
        lab.swapped.flip();
    }
    return lab;
}

double pair_residual(const Frame& fr, std::size_t li, std::size_t ri, bool swap, const std::array<SeriesCurve, 4>& curves,
                     double fd) {
    const Vec2 l = assigned(fr, li, ri, swap, Side::left);
    const Vec2 r = assigned(fr, li, ri, swap, Side::right);
    return std::abs(l.x - curves[0](fd)) + std::abs(l.y - curves[1](fd)) + std::abs(r.x - curves[2](fd)) +
           std::abs(r.y - curves[3](fd));
}

} // namespace

SwapRepair repair_swaps(const TrajectorySet& t, const CleaningConfig& cfg) {
    cfg.validate();
    const std::size_t n = t.frame_count();
    std::vector<Frame> frames = t.frames();
    std::vector<std::array<bool, 4>> swapped(n, std::array<bool, 4>{});
    std::vector<SwapWindow> windows;

    for (Segment g : kAllSegments) {
        const JointId lj = joint(Side::left, g);
        const JointId rj = joint(Side::right, g);
        const std::size_t li = index_of(lj);
        const std::size_t ri = index_of(rj);

        // Outlier runs shorter than a swap window are misallocations; they
        // are left out of the labeling so a displaced point cannot bridge a
        // false relabeling.
        std::vector<bool> excluded(n, false);
        {
            const std::array<Series, 4> raw = {extract_series(t, lj, Axis::x), extract_series(t, lj, Axis::y),
                                               extract_series(t, rj, Axis::x), extract_series(t, rj, Axis::y)};
            if (present_count(raw[0]) < cfg.min_samples || present_count(raw[2]) < cfg.min_samples) {
                continue;
            }
            std::vector<bool> flagged(n, false);
            for (const Series& s : raw) {
                for (std::size_t f : fit_and_detect(s, t.fps(), cfg).outliers) {
                    flagged[f] = true;
                }
            }
            for (std::size_t f = 0; f < n;) {
                if (!flagged[f]) {
                    ++f;
                    continue;
                }
                std::size_t e = f;
                while (e < n && flagged[e]) {
                    ++e;
                }
                if (e - f < static_cast<std::size_t>(cfg.swap_window)) {
                    std::fill(excluded.begin() + static_cast<std::ptrdiff_t>(f),
                              excluded.begin() + static_cast<std::ptrdiff_t>(e), true);
                }
                f = e;
            }
        }
        const Labeling lab = continuity_labeling(frames, li, ri, excluded);
        // Candidate windows: runs of relabeled frames, spanning any frames in
        // between where one side is missing.
        std::vector<SwapWindow> candidates;
        for (std::size_t k = 0; k < lab.frames.size(); ++k) {
            if (!lab.swapped[k]) {
                continue;
            }
            if (k > 0 && lab.swapped[k - 1] && !candidates.empty()) {
                candidates.back().last = lab.frames[k];
            } else {
                candidates.push_back({g, lab.frames[k], lab.frames[k]});
            }
        }
        std::erase_if(candidates, [&](const SwapWindow& w) {
            return w.last - w.first + 1 < static_cast<std::size_t>(cfg.swap_window);
        });
        if (candidates.empty()) {
            continue;
        }

        // Confirm each window against predictors fitted to the relabeled
        // hypothesis: the relabeling must at least halve the residual.
        std::vector<Frame> hypothesis = frames;
        for (const SwapWindow& w : candidates) {
            for (std::size_t f = w.first; f <= w.last; ++f) {
                std::swap(hypothesis[f][li], hypothesis[f][ri]);
            }
        }
        const TrajectorySet h = t.with_frames(hypothesis);
        const std::array<Series, 4> series = {extract_series(h, lj, Axis::x), extract_series(h, lj, Axis::y),
                                              extract_series(h, rj, Axis::x), extract_series(h, rj, Axis::y)};
        if (present_count(series[0]) < cfg.min_samples || present_count(series[2]) < cfg.min_samples) {
            continue;
        }
        const std::array<SeriesCurve, 4> curves = {
            fit_svr_curve(series[0], t.fps(), cfg), fit_svr_curve(series[1], t.fps(), cfg),
            fit_svr_curve(series[2], t.fps(), cfg), fit_svr_curve(series[3], t.fps(), cfg)};
        for (const SwapWindow& w : candidates) {
            double kept = 0.0;
            double exchanged = 0.0;
            for (std::size_t f = w.first; f <= w.last; ++f) {
                if (frames[f][li].missing || frames[f][ri].missing) {
                    continue;
                }
                const double fd = static_cast<double>(f);
                kept += pair_residual(frames[f], li, ri, false, curves, fd);
                exchanged += pair_residual(frames[f], li, ri, true, curves, fd);
            }
            if (kept > 0.0 && exchanged <= 0.5 * kept) {
                for (std::size_t f = w.first; f <= w.last; ++f) {
                    std::swap(frames[f][li], frames[f][ri]);
                    swapped[f][static_cast<std::size_t>(g)] = true;
                }
                windows.push_back(w);
            }
        }
    }
    return {t.with_frames(std::move(frames)), std::move(windows), std::move(swapped)};
}

FillRepair repair_loss_and_misallocation(const TrajectorySet& t, const CleaningConfig& cfg) {
    cfg.validate();
    const std::size_t n = t.frame_count();
    std::vector<Frame> frames = t.frames();
    std::vector<std::array<SampleClass, kJointCount>> classes(n);
    for (auto& row : classes) {
        row.fill(SampleClass::clean);
    }

    for (JointId j : kAllJoints) {
        const std::size_t ji = index_of(j);
        const Series sx = extract_series(t, j, Axis::x);
        const Series sy = extract_series(t, j, Axis::y);
        require_recoverable(sx, j, cfg);

        AxisFit fx = fit_and_detect(sx, t.fps(), cfg);
        AxisFit fy = fit_and_detect(sy, t.fps(), cfg);
        std::set<std::size_t> flagged(fx.outliers.begin(), fx.outliers.end());
        flagged.insert(fy.outliers.begin(), fy.outliers.end());

        // Refit with the flagged samples held out so they cannot pull the
        // predictor, then re-detect against the refit until stable.
        for (int pass = 0; pass < 3 && !flagged.empty(); ++pass) {
            Series hx = sx;
            Series hy = sy;
            for (std::size_t f : flagged) {
                hx[f].reset();
                hy[f].reset();
            }
            if (present_count(hx) < cfg.min_samples) {
                break;
            }
            fx.curve = fit_svr_curve(hx, t.fps(), cfg);
            fy.curve = fit_svr_curve(hy, t.fps(), cfg);
            std::set<std::size_t> next;
            const double tx = std::max(cfg.outlier_k * robust_residual_scale(hx, fx.curve), fx.curve.epsilon());
            const double ty = std::max(cfg.outlier_k * robust_residual_scale(hy, fy.curve), fy.curve.epsilon());
            for (std::size_t f = 0; f < n; ++f) {
                if (!sx[f]) {
                    continue;
                }
                const double fd = static_cast<double>(f);
                if (std::abs(*sx[f] - fx.curve(fd)) > tx || std::abs(*sy[f] - fy.curve(fd)) > ty) {
                    next.insert(f);
                }
            }
            if (next == flagged) {
                break;
            }
            flagged = std::move(next);
        }

        for (std::size_t f = 0; f < n; ++f) {
            KeypointSample& s = frames[f][ji];
            const bool lost = s.missing;
            const bool misallocated = !lost && flagged.count(f) > 0;
            if (!lost && !misallocated) {
                continue;
            }
            const double fd = static_cast<double>(f);
            set_axis(s, Axis::x, fx.curve(fd));
            set_axis(s, Axis::y, fy.curve(fd));
            s.missing = false;
            classes[f][ji] = lost ? SampleClass::lost : SampleClass::misallocated;
        }
    }
    return {t.with_frames(std::move(frames)), std::move(classes)};
}

CleanResult clean(const TrajectorySet& t, const CleaningConfig& cfg) {
    if (t.coordinates() != CoordinateFrame::canonical) {
        throw ValidationError("clean: trajectory must be canonicalized first");
    }
    cfg.validate();
    for (JointId j : kAllJoints) {
        require_recoverable(extract_series(t, j, Axis::x), j, cfg);
    }
    SwapRepair swaps = repair_swaps(t, cfg);
    FillRepair fill = repair_loss_and_misallocation(swaps.trajectory, cfg);

    CleaningReport report;
    report.classes = std::move(fill.classes);
    report.swap_windows = std::move(swaps.windows);
    for (std::size_t f = 0; f < t.frame_count(); ++f) {
        for (JointId j : kAllJoints) {
            SampleClass& c = report.classes[f][index_of(j)];
            if (c != SampleClass::lost && swaps.swapped[f][static_cast<std::size_t>(segment_of(j))]) {
                c = SampleClass::swapped;
            }
        }
    }
    return {std::move(fill.trajectory), std::move(report)};
}

JointCounts CleaningReport::counts(JointId j) const {
    JointCounts c;
    for (const auto& row : classes) {
        switch (row[index_of(j)]) {
        case SampleClass::clean:
            ++c.clean;
            break;
        case SampleClass::lost:
            ++c.lost;
            break;
        case SampleClass::swapped:
            ++c.swapped;
            break;
        case SampleClass::misallocated:
            ++c.misallocated;
            break;
        }
    }
    return c;
}

std::vector<CorrectedRange> CleaningReport::corrected_ranges() const {
    std::vector<CorrectedRange> ranges;
    for (JointId j : kAllJoints) {
        for (std::size_t f = 0; f < classes.size(); ++f) {
            const SampleClass c = classes[f][index_of(j)];
            if (c == SampleClass::clean) {
                continue;
            }
            if (!ranges.empty() && ranges.back().joint == j && ranges.back().kind == c &&
                ranges.back().last + 1 == f) {
                ranges.back().last = f;
            } else {
                ranges.push_back({j, c, f, f});
            }
        }
    }
    return ranges;
}

bool CleaningReport::all_clean() const {
    return std::all_of(classes.begin(), classes.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](SampleClass c) { return c == SampleClass::clean; });
    });
}

std::string CleaningReport::to_json() const {
    nlohmann::json root;
    root["frames"] = classes.size();
    nlohmann::json joints = nlohmann::json::object();
    for (JointId j : kAllJoints) {
        const JointCounts c = counts(j);
        joints[std::string(name_of(j))] = {
            {"clean", c.clean}, {"lost", c.lost}, {"swapped", c.swapped}, {"misallocated", c.misallocated}};
    }
    root["counts"] = joints;
    nlohmann::json ranges = nlohmann::json::array();
    for (const CorrectedRange& r : corrected_ranges()) {
        ranges.push_back({{"joint", std::string(name_of(r.joint))},
                          {"type", std::string(name_of(r.kind))},
                          {"first_frame", r.first},
                          {"last_frame", r.last}});
    }
    root["corrected_ranges"] = ranges;
    nlohmann::json sw = nlohmann::json::array();
    for (const SwapWindow& w : swap_windows) {
        sw.push_back({{"segment", std::string(name_of(w.segment))}, {"first_frame", w.first}, {"last_frame", w.last}});
    }
    root["swap_windows"] = sw;
    return root.dump(2);
}

} // namespace strideflex
