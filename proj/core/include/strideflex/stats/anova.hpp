#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace strideflex::stats {

struct Factor {
    std::string name;
    std::vector<std::string> levels;
};

/// Balanced mixed design: one between factor (subjects), `units` replicate
/// units nested in each of its levels (sprints), and fully crossed within
/// factors (method, time). Values are stored row-major over
/// [between, unit, within...].
class Design {
public:
    Design(Factor between, std::string unit_name, std::size_t units, std::vector<Factor> within);

    const Factor& between() const { return between_; }
    const std::string& unit_name() const { return unit_name_; }
    std::size_t units() const { return units_; }
    const std::vector<Factor>& within() const { return within_; }

    /// Level counts in storage order: between, unit, within...
    std::vector<std::size_t> shape() const;
    std::size_t cell_count() const { return values_.size(); }

    double& at(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels);
    double at(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels) const;

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    std::size_t offset(std::size_t between_level, std::size_t unit, std::span<const std::size_t> within_levels) const;

    Factor between_;
    std::string unit_name_;
    std::size_t units_;
    std::vector<Factor> within_;
    std::vector<double> values_;
};

/// A long-format table: one observation per row.
struct LongTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

LongTable read_long_table(std::istream& in);
void write_long_table(std::ostream& out, const LongTable& t);

struct DesignSpec {
    std::string between = "subject";
    std::string unit = "sprint";
    std::vector<std::string> within = {"method", "time"};
    std::string value = "value";
};

/// Builds a balanced design from long-format rows. Levels keep their first
/// seen order. Throws ValidationError naming the offending cell when a
/// combination is missing or repeated, or the units per subject differ.
Design design_from_table(const LongTable& t, const DesignSpec& spec);

enum class EffectSize { below_small, small, medium, large };

std::string_view name_of(EffectSize e);
/// Thresholds 0.01, 0.06 and 0.14.
EffectSize classify_effect(double eta2_g);

/// SS_effect / (SS_effect + error_ss), the generalized eta squared with
/// every factor treated as manipulated. Throws ValidationError when both are zero.
double generalized_eta_squared(double ss_effect, double error_ss);

struct AnovaRow {
    std::string effect;
    std::string error_term;
    double ss = 0.0;
    double df = 0.0;
    double ms = 0.0;
    double f = 0.0;
    double p = 1.0;
    double p_bonferroni = 1.0;
    double eta2_g = 0.0;
    EffectSize size = EffectSize::below_small;

    bool significant(double alpha = 0.05) const { return p_bonferroni < alpha; }
};

struct ErrorStratum {
    std::string name;
    double ss = 0.0;
    double df = 0.0;
    double ms = 0.0;
};

struct AnovaTable {
    std::vector<AnovaRow> effects;
    std::vector<ErrorStratum> errors;
    double total_ss = 0.0;
    double total_df = 0.0;
    std::size_t bonferroni_m = 0;

    const AnovaRow& effect(std::string_view name) const;
    /// |sum of effect and error SS - total SS| / total SS (0 when total is 0).
    double additivity_error() const;

    std::string to_json() const;
};

/// Names an interaction the way the table does, e.g. "method x time".
std::string effect_name(std::span<const std::string> factors);

/// Mixed-design repeated measures ANOVA without sphericity correction.
/// The between effect is tested against units within subjects; each
/// within effect and its interaction with the between factor is tested
/// against its units-within-subjects interaction. Needs at least 2 units
/// per subject and 2 levels per factor.
AnovaTable rm_anova(const Design& d);

void write_anova_csv(std::ostream& out, const AnovaTable& t);
void write_anova_text(std::ostream& out, const AnovaTable& t, std::string_view title = {});

} // namespace strideflex::stats
