#include "strideflex/study.hpp"

#include "strideflex/error.hpp"
#include "strideflex/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace strideflex {

ScreenedAnova screened_anova(std::string name, const stats::Design& d) {
    ScreenedAnova s;
    s.name = std::move(name);
    s.table = stats::rm_anova(d);

    const std::size_t levels = d.between().levels.size();
    const std::size_t per = d.cell_count() / levels;
    std::vector<std::vector<double>> groups(levels);
    for (std::size_t b = 0; b < levels; ++b) {
        const auto v = d.values().subspan(b * per, per);
        groups[b].assign(v.begin(), v.end());
    }
    s.groups = d.between().levels;
    try {
        s.levene = stats::levene_test(groups);
    } catch (const ValidationError& e) {
        s.levene_note = e.what();
    }
    for (const auto& g : groups) {
        try {
            s.normality.push_back(stats::shapiro_wilk(g));
            s.normality_notes.emplace_back();
        } catch (const ValidationError& e) {
            s.normality.push_back(std::nullopt);
            s.normality_notes.emplace_back(e.what());
        }
    }
    return s;
}

std::string ScreenedAnova::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["anova"] = nlohmann::json::parse(table.to_json());
    if (levene) {
        j["levene"] = {{"statistic", levene->statistic},
                       {"df_between", levene->df_between},
                       {"df_within", levene->df_within},
                       {"p", levene->p},
                       {"homogeneous", levene->p >= 0.05}};
    } else {
        j["levene"] = {{"note", levene_note}};
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (normality[i]) {
            j["normality"][groups[i]] = {{"w", normality[i]->w}, {"p", normality[i]->p}, {"normal", normality[i]->normal}};
        } else {
            j["normality"][groups[i]] = {{"note", normality_notes[i]}};
        }
    }
    return j.dump(2);
}

void ScreenedAnova::write_text(std::ostream& out) const {
    stats::write_anova_text(out, table, name);
    out << std::fixed << std::setprecision(4);
    if (levene) {
        out << "Levene (median): W = " << levene->statistic << ", df = " << std::setprecision(0) << levene->df_between
            << "/" << levene->df_within << std::setprecision(4) << ", p = " << levene->p
            << (levene->p < 0.05 ? " (variances differ)" : "") << '\n';
    } else {
        out << "Levene: " << levene_note << '\n';
    }
    out << "Shapiro-Wilk:";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        out << ' ' << groups[i] << '=';
        if (normality[i]) {
            out << normality[i]->w << " (p " << normality[i]->p << ')';
        } else {
            out << "n/a";
        }
    }
    out << '\n';
    out.unsetf(std::ios::floatfield);
}

std::vector<std::string> sources_in(std::span<const StrideSummary> summaries) {
    std::vector<std::string> out;
    for (const StrideSummary& s : summaries) {
        if (std::find(out.begin(), out.end(), s.source) == out.end()) {
            out.push_back(s.source);
        }
    }
    return out;
}

std::vector<ScreenedAnova> study_anovas(std::span<const StrideSummary> summaries, const std::string& truth_source) {
    const std::vector<std::string> sources = sources_in(summaries);
    if (std::find(sources.begin(), sources.end(), truth_source) == sources.end()) {
        throw ValidationError("no summaries for the truth source '" + truth_source + "'");
    }
    auto of = [&](const std::string& src) {
        std::vector<StrideSummary> out;
        std::copy_if(summaries.begin(), summaries.end(), std::back_inserter(out),
                     [&](const StrideSummary& s) { return s.source == src; });
        return out;
    };
    const std::vector<StrideSummary> truth = of(truth_source);
    std::vector<ErrorReport> reports;
    for (const std::string& src : sources) {
        if (src != truth_source) {
            const std::vector<StrideSummary> cand = of(src);
            reports.push_back(compare(cand, truth));
        }
    }

    std::vector<ScreenedAnova> out;
    for (Side side : kBothSides) {
        for (Channel c : kAllChannels) {
            const std::string joint = std::string(name_of(side)) + "_" + std::string(name_of(c));
            if (sources.size() >= 2) {
                const stats::LongTable t = angle_table(summaries, c, side);
                out.push_back(screened_anova("angle_" + joint, stats::design_from_table(t, {})));
            }
            if (!reports.empty()) {
                stats::DesignSpec spec;
                if (reports.size() == 1) {
                    spec.within = {"time"};
                }
                const stats::LongTable t = error_table(reports, c, side);
                out.push_back(screened_anova("error_" + joint, stats::design_from_table(t, spec)));
            }
        }
    }
    return out;
}

} // namespace strideflex
