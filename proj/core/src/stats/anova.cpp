#include "strideflex/stats/anova.hpp"

#include "strideflex/error.hpp"
#include "strideflex/stats/distributions.hpp"
#include "strideflex/stats/tests.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace strideflex::stats {
namespace {

constexpr unsigned kBetweenBit = 1u;
constexpr unsigned kUnitBit = 2u;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string format_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

nlohmann::json json_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

} // namespace

Design::Design(Factor between, std::string unit_name, std::size_t units, std::vector<Factor> within)
    : between_(std::move(between)), unit_name_(std::move(unit_name)), units_(units), within_(std::move(within)) {
    if (between_.levels.size() < 2) {
        throw ValidationError("design: between factor '" + between_.name + "' needs at least 2 levels");
    }
    if (units_ == 0) {
        throw ValidationError("design: at least one " + unit_name_ + " per " + between_.name + " is required");
    }
    std::size_t n = between_.levels.size() * units_;
    for (const Factor& f : within_) {
        if (f.levels.size() < 2) {
            throw ValidationError("design: within factor '" + f.name + "' needs at least 2 levels");
        }
        n *= f.levels.size();
    }
    values_.assign(n, 0.0);
}

std::vector<std::size_t> Design::shape() const {
    std::vector<std::size_t> s = {between_.levels.size(), units_};
    for (const Factor& f : within_) {
        s.push_back(f.levels.size());
    }
    return s;
}

std::size_t Design::offset(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels) const {
    if (within_levels.size() != within_.size() || between_level >= between_.levels.size() || unit >= units_) {
        throw ValidationError("design: cell index out of range");
    }
    std::size_t off = between_level * units_ + unit;
    for (std::size_t k = 0; k < within_.size(); ++k) {
        if (within_levels[k] >= within_[k].levels.size()) {
            throw ValidationError("design: level index out of range for '" + within_[k].name + "'");
        }
        off = off * within_[k].levels.size() + within_levels[k];
    }
    return off;
}

double& Design::at(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels) {
    return values_[offset(between_level, unit, within_levels)];
}

double Design::at(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels) const {
    return values_[offset(between_level, unit, within_levels)];
}

std::size_t LongTable::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw ValidationError("table has no column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

LongTable read_long_table(std::istream& in) {
    LongTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> cells = split_csv_line(line);
        if (t.columns.empty()) {
            t.columns = std::move(cells);
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw ValidationError("table line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.columns.size()) + " cells, got " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.columns.empty()) {
        throw ValidationError("table is empty");
    }
    return t;
}

void write_long_table(std::ostream& out, const LongTable& t) {
    auto write_row = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << r[i];
        }
        out << '\n';
    };
    write_row(t.columns);
    for (const auto& r : t.rows) {
        write_row(r);
    }
}

Design design_from_table(const LongTable& t, const DesignSpec& spec) {
    const std::size_t bc = t.column(spec.between);
    const std::size_t uc = t.column(spec.unit);
    const std::size_t vc = t.column(spec.value);
    std::vector<std::size_t> wc;
    for (const std::string& w : spec.within) {
        wc.push_back(t.column(w));
    }

    auto level_index = [](std::vector<std::string>& levels, const std::string& v) {
        const auto it = std::find(levels.begin(), levels.end(), v);
        if (it != levels.end()) {
            return static_cast<std::size_t>(it - levels.begin());
        }
        levels.push_back(v);
        return levels.size() - 1;
    };

    Factor between{spec.between, {}};
    std::vector<Factor> within;
    for (const std::string& w : spec.within) {
        within.push_back({w, {}});
    }
    std::vector<std::vector<std::string>> units_of; // per between level
    struct Obs {
        std::size_t b, u;
        std::vector<std::size_t> w;
        double v;
        std::size_t row;
    };
    std::vector<Obs> obs;
    obs.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        Obs o;
        o.b = level_index(between.levels, row[bc]);
        if (units_of.size() < between.levels.size()) {
            units_of.resize(between.levels.size());
        }
        o.u = level_index(units_of[o.b], row[uc]);
        for (std::size_t k = 0; k < wc.size(); ++k) {
            o.w.push_back(level_index(within[k].levels, row[wc[k]]));
        }
        const std::string& cell = row[vc];
        char* end = nullptr;
        o.v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(o.v)) {
            throw ValidationError("table row " + std::to_string(r + 2) + ": '" + cell + "' is not a finite number");
        }
        o.row = r;
        obs.push_back(std::move(o));
    }
    if (between.levels.empty()) {
        throw ValidationError("table has no observations");
    }
    const std::size_t units = units_of.front().size();
    for (std::size_t b = 0; b < units_of.size(); ++b) {
        if (units_of[b].size() != units) {
            throw ValidationError("unbalanced design: " + spec.between + " '" + between.levels[b] + "' has " +
                                  std::to_string(units_of[b].size()) + " " + spec.unit + " levels, " +
                                  spec.between + " '" + between.levels.front() + "' has " + std::to_string(units));
        }
    }

    Design d(between, spec.unit, units, within);
    std::vector<int> seen(d.cell_count(), -1);
    auto describe = [&](std::size_t b, std::size_t u, const std::vector<std::size_t>& w) {
        std::string s = spec.between + "=" + between.levels[b] + ", " + spec.unit + "=" + units_of[b][u];
        for (std::size_t k = 0; k < w.size(); ++k) {
            s += ", " + within[k].name + "=" + within[k].levels[w[k]];
        }
        return s;
    };
    for (const Obs& o : obs) {
        double& slot = d.at(o.b, o.u, o.w);
        const std::size_t off = static_cast<std::size_t>(&slot - d.values().data());
        if (seen[off] >= 0) {
            throw ValidationError("unbalanced design: cell (" + describe(o.b, o.u, o.w) + ") appears on rows " +
                                  std::to_string(seen[off] + 2) + " and " + std::to_string(o.row + 2));
        }
        seen[off] = static_cast<int>(o.row);
        slot = o.v;
    }
    // Decode the first missing offset back into factor levels for the message.
    for (std::size_t off = 0; off < seen.size(); ++off) {
        if (seen[off] >= 0) {
            continue;
        }
        std::vector<std::size_t> w(within.size());
        std::size_t rest = off;
        for (std::size_t k = within.size(); k-- > 0;) {
            w[k] = rest % within[k].levels.size();
            rest /= within[k].levels.size();
        }
        const std::size_t u = rest % units;
        const std::size_t b = rest / units;
        throw ValidationError("unbalanced design: no observation for cell (" + describe(b, u, w) + ")");
    }
    return d;
}

std::string_view name_of(EffectSize e) {
    switch (e) {
    case EffectSize::below_small:
        return "below-small";
    case EffectSize::small:
        return "small";
    case EffectSize::medium:
        return "medium";
    case EffectSize::large:
        return "large";
    }
    return "below-small";
}

EffectSize classify_effect(double eta2_g) {
    if (eta2_g >= 0.14) {
        return EffectSize::large;
    }
    if (eta2_g >= 0.06) {
        return EffectSize::medium;
    }
    if (eta2_g >= 0.01) {
        return EffectSize::small;
    }
    return EffectSize::below_small;
}

double generalized_eta_squared(double ss_effect, double error_ss) {
    if (!(ss_effect >= 0.0) || !(error_ss >= 0.0)) {
        throw ValidationError("generalized_eta_squared: sums of squares must be non-negative");
    }
    if (ss_effect + error_ss == 0.0) {
        throw ValidationError("generalized_eta_squared: zero total variance");
    }
    return ss_effect / (ss_effect + error_ss);
}

std::string effect_name(std::span<const std::string> factors) {
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        s += (i ? " x " : "") + factors[i];
    }
    return s;
}

const AnovaRow& AnovaTable::effect(std::string_view name) const {
    for (const AnovaRow& r : effects) {
        if (r.effect == name) {
            return r;
        }
    }
    throw ValidationError("anova table has no effect '" + std::string(name) + "'");
}

double AnovaTable::additivity_error() const {
    double sum = 0.0;
    for (const AnovaRow& r : effects) {
        sum += r.ss;
    }
    for (const ErrorStratum& e : errors) {
        sum += e.ss;
    }
    if (total_ss == 0.0) {
        return std::abs(sum);
    }
    return std::abs(sum - total_ss) / total_ss;
}

AnovaTable rm_anova(const Design& d) {
    if (d.units() < 2) {
        throw ValidationError("rm_anova: the " + d.unit_name() + "(" + d.between().name +
                              ") error strata need at least 2 " + d.unit_name() + " per " + d.between().name);
    }
    const std::vector<std::size_t> shape = d.shape();
    const std::size_t dims = shape.size();
    const std::size_t n = d.cell_count();
    const unsigned full = (1u << dims) - 1u;
    std::vector<std::string> names = {d.between().name, d.unit_name()};
    for (const Factor& f : d.within()) {
        names.push_back(f.name);
    }

    // Multi-index of every cell.
    std::vector<std::vector<std::size_t>> index(n, std::vector<std::size_t>(dims));
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t rest = c;
        for (std::size_t k = dims; k-- > 0;) {
            index[c][k] = rest % shape[k];
            rest /= shape[k];
        }
    }

    const std::span<const double> raw = d.values();
    const double grand = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(n);
    std::vector<double> y(n);
    double raw_sq = 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        y[c] = raw[c] - grand;
        raw_sq += raw[c] * raw[c];
        total += y[c] * y[c];
    }
    // Sums of squares below this are rounding noise of a constant input.
    const double floor = 1e-26 * raw_sq;

    // Marginal means of the centred data for every subset of factors.
    auto key = [&](std::size_t c, unsigned mask) {
        std::size_t k = 0;
        for (std::size_t f = 0; f < dims; ++f) {
            if (mask & (1u << f)) {
                k = k * shape[f] + index[c][f];
            }
        }
        return k;
    };
    std::vector<std::vector<double>> means(full + 1);
    for (unsigned mask = 0; mask <= full; ++mask) {
        std::size_t cells = 1;
        for (std::size_t f = 0; f < dims; ++f) {
            if (mask & (1u << f)) {
                cells *= shape[f];
            }
        }
        std::vector<double> sum(cells, 0.0);
        for (std::size_t c = 0; c < n; ++c) {
            sum[key(c, mask)] += y[c];
        }
        const double per = static_cast<double>(n / cells);
        for (double& s : sum) {
            s /= per;
        }
        means[mask] = std::move(sum);
    }

    // Effect of a factor subset by inclusion-exclusion over its sub-margins.
    std::vector<double> ss(full + 1, 0.0);
    for (unsigned mask = 1; mask <= full; ++mask) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            double e = 0.0;
            for (unsigned sub = mask;; sub = (sub - 1) & mask) {
                const int sign = (std::popcount(mask ^ sub) % 2 == 0) ? 1 : -1;
                e += sign * means[sub][key(c, sub)];
                if (sub == 0) {
                    break;
                }
            }
            acc += e * e;
        }
        ss[mask] = acc < floor ? 0.0 : acc;
    }

    auto df_of = [&](unsigned mask) {
        double df = 1.0;
        for (std::size_t f = 0; f < dims; ++f) {
            if (mask & (1u << f)) {
                df *= static_cast<double>(shape[f] - 1);
            }
        }
        return df;
    };
    const unsigned within_bits = full & ~(kBetweenBit | kUnitBit);
    auto names_of = [&](unsigned mask) {
        std::vector<std::string> v;
        for (std::size_t f = 0; f < dims; ++f) {
            if (f != 1 && (mask & (1u << f))) {
                v.push_back(names[f]);
            }
        }
        return v;
    };

    AnovaTable t;
    t.total_ss = total < floor ? 0.0 : total;
    t.total_df = static_cast<double>(n - 1);

    // Error strata: units within subjects, crossed with each within subset.
    std::map<unsigned, std::size_t> stratum_of; // within subset -> index in t.errors
    for (unsigned q = 0; q <= within_bits; ++q) {
        if ((q & within_bits) != q) {
            continue;
        }
        ErrorStratum e;
        const std::vector<std::string> w = names_of(q);
        e.name = d.unit_name() + "(" + d.between().name + ")";
        for (const std::string& s : w) {
            e.name += " x " + s;
        }
        e.ss = ss[kUnitBit | q] + ss[kBetweenBit | kUnitBit | q];
        e.df = static_cast<double>(shape[0]) * df_of(kUnitBit | q);
        e.ms = e.ss / e.df;
        stratum_of[q] = t.errors.size();
        t.errors.push_back(e);
    }
    double error_ss = 0.0;
    for (const ErrorStratum& e : t.errors) {
        error_ss += e.ss;
    }

    std::vector<unsigned> effect_masks;
    for (unsigned mask = 1; mask <= full; ++mask) {
        if (!(mask & kUnitBit)) {
            effect_masks.push_back(mask);
        }
    }
    std::sort(effect_masks.begin(), effect_masks.end(), [&](unsigned a, unsigned b) {
        if (std::popcount(a) != std::popcount(b)) {
            return std::popcount(a) < std::popcount(b);
        }
        std::vector<std::size_t> fa, fb;
        for (std::size_t f = 0; f < dims; ++f) {
            if (a & (1u << f)) {
                fa.push_back(f);
            }
            if (b & (1u << f)) {
                fb.push_back(f);
            }
        }
        return fa < fb;
    });

    for (unsigned mask : effect_masks) {
        AnovaRow r;
        r.effect = effect_name(names_of(mask));
        r.ss = ss[mask];
        r.df = df_of(mask);
        r.ms = r.ss / r.df;
        const ErrorStratum& err = t.errors[stratum_of.at(mask & within_bits)];
        r.error_term = err.name;
        if (r.ss == 0.0) {
            r.f = 0.0;
            r.p = 1.0;
        } else if (err.ms == 0.0) {
            r.f = std::numeric_limits<double>::infinity();
            r.p = 0.0;
        } else {
            r.f = r.ms / err.ms;
            r.p = f_sf(r.f, r.df, err.df);
        }
        r.eta2_g = r.ss + error_ss > 0.0 ? generalized_eta_squared(r.ss, error_ss) : 0.0;
        r.size = classify_effect(r.eta2_g);
        t.effects.push_back(std::move(r));
    }

    t.bonferroni_m = t.effects.size();
    std::vector<double> p;
    for (const AnovaRow& r : t.effects) {
        p.push_back(r.p);
    }
    const std::vector<double> adjusted = bonferroni(p, t.bonferroni_m);
    for (std::size_t i = 0; i < t.effects.size(); ++i) {
        t.effects[i].p_bonferroni = adjusted[i];
    }
    return t;
}

std::string AnovaTable::to_json() const {
    nlohmann::json j;
    j["bonferroni_m"] = bonferroni_m;
    j["total_ss"] = total_ss;
    j["total_df"] = total_df;
    j["effects"] = nlohmann::json::array();
    for (const AnovaRow& r : effects) {
        j["effects"].push_back({{"effect", r.effect},
                                {"ss", r.ss},
                                {"df", r.df},
                                {"ms", r.ms},
                                {"f", json_number(r.f)},
                                {"p", r.p},
                                {"p_bonferroni", r.p_bonferroni},
                                {"eta2_g", r.eta2_g},
                                {"effect_size", std::string(name_of(r.size))},
                                {"error_term", r.error_term},
                                {"significant", r.significant()}});
    }
    j["errors"] = nlohmann::json::array();
    for (const ErrorStratum& e : errors) {
        j["errors"].push_back({{"stratum", e.name}, {"ss", e.ss}, {"df", e.df}, {"ms", e.ms}});
    }
    return j.dump(2);
}

void write_anova_csv(std::ostream& out, const AnovaTable& t) {
    out << "effect,ss,df,ms,f,p,p_bonferroni,eta2_g,effect_size,error_term\n";
    for (const AnovaRow& r : t.effects) {
        out << r.effect << ',' << format_number(r.ss) << ',' << format_number(r.df) << ',' << format_number(r.ms)
            << ',' << format_number(r.f) << ',' << format_number(r.p) << ',' << format_number(r.p_bonferroni) << ','
            << format_number(r.eta2_g) << ',' << name_of(r.size) << ',' << r.error_term << '\n';
    }
    for (const ErrorStratum& e : t.errors) {
        out << e.name << ',' << format_number(e.ss) << ',' << format_number(e.df) << ',' << format_number(e.ms)
            << ",,,,,,\n";
    }
}

void write_anova_text(std::ostream& out, const AnovaTable& t, std::string_view title) {
    if (!title.empty()) {
        out << title << '\n' << std::string(title.size(), '=') << '\n';
    }
    std::size_t width = 6;
    for (const AnovaRow& r : t.effects) {
        width = std::max(width, r.effect.size());
    }
    for (const ErrorStratum& e : t.errors) {
        width = std::max(width, e.name.size());
    }
    const int w = static_cast<int>(width) + 2;
    out << std::left << std::setw(w) << "effect" << std::right << std::setw(14) << "SS" << std::setw(6) << "df"
        << std::setw(14) << "MS" << std::setw(11) << "F" << std::setw(11) << "p" << std::setw(11) << "p_bonf"
        << std::setw(9) << "eta2_g" << "  size\n";
    for (const AnovaRow& r : t.effects) {
        out << std::left << std::setw(w) << r.effect << std::right << std::fixed << std::setprecision(3)
            << std::setw(14) << r.ss << std::setw(6) << std::setprecision(0) << r.df << std::setprecision(3)
            << std::setw(14) << r.ms << std::setw(11) << r.f << std::setprecision(4) << std::setw(11) << r.p
            << std::setw(11) << r.p_bonferroni << std::setprecision(3) << std::setw(9) << r.eta2_g << "  "
            << name_of(r.size) << (r.significant() ? " *" : "") << '\n';
    }
    out << "error strata\n";
    for (const ErrorStratum& e : t.errors) {
        out << std::left << std::setw(w) << e.name << std::right << std::setw(14) << std::setprecision(3) << e.ss
            << std::setw(6) << std::setprecision(0) << e.df << std::setprecision(3) << std::setw(14) << e.ms << '\n';
    }
    out.unsetf(std::ios::floatfield);
    out << "Bonferroni m = " << t.bonferroni_m << "; * marks p_bonf < 0.05; no sphericity correction\n";
}

} // namespace strideflex::stats
