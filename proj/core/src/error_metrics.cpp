#include "strideflex/error_metrics.hpp"

#include "strideflex/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>

namespace strideflex {
namespace {

std::string describe(const SummaryKey& k) {
    return "subject " + k.subject_id + ", sprint " + k.sprint_id + ", " + std::string(name_of(k.side)) + " side";
}

std::map<SummaryKey, const StrideSummary*> index_summaries(std::span<const StrideSummary> set, const char* which) {
    std::map<SummaryKey, const StrideSummary*> out;
    for (const StrideSummary& s : set) {
        if (!out.emplace(s.key, &s).second) {
            throw ValidationError(std::string(which) + " set lists " + describe(s.key) + " twice");
        }
    }
    return out;
}

ErrorAggregate summarize(std::span<const double> abs, std::span<const double> sgn) {
    ErrorAggregate a;
    a.n = abs.size();
    if (a.n == 0) {
        return a;
    }
    const double n = static_cast<double>(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        a.mean_abs += abs[i];
        a.mean_signed += sgn[i];
    }
    a.mean_abs /= n;
    a.mean_signed /= n;
    if (a.n > 1) {
        double va = 0.0, vs = 0.0;
        for (std::size_t i = 0; i < a.n; ++i) {
            va += (abs[i] - a.mean_abs) * (abs[i] - a.mean_abs);
            vs += (sgn[i] - a.mean_signed) * (sgn[i] - a.mean_signed);
        }
        a.sd_abs = std::sqrt(va / (n - 1.0));
        a.sd_signed = std::sqrt(vs / (n - 1.0));
        a.sem_abs = a.sd_abs / std::sqrt(n);
        a.sem_signed = a.sd_signed / std::sqrt(n);
    }
    return a;
}

nlohmann::json to_json(const ErrorAggregate& a) {
    return {{"n", a.n},           {"mean_abs", a.mean_abs},       {"sd_abs", a.sd_abs},
            {"sem_abs", a.sem_abs}, {"mean_signed", a.mean_signed}, {"sd_signed", a.sd_signed},
            {"sem_signed", a.sem_signed}};
}

void check(const ErrorAggregate& a, const std::string& what) {
    // Relative slack for the rounding of two separate sums.
    const double slack = 1e-12 * std::max(1.0, a.mean_abs);
    if (a.mean_abs + slack < std::abs(a.mean_signed)) {
        throw std::logic_error("error report: mean absolute error below |mean signed difference| for " + what);
    }
}

std::string joint_label(Channel c, Side s) {
    return std::string(name_of(s)) + "_" + std::string(name_of(c));
}

} // namespace

ErrorAggregate aggregate(std::span<const ErrorCell* const> cells) {
    std::vector<double> abs, sgn;
    abs.reserve(cells.size());
    sgn.reserve(cells.size());
    for (const ErrorCell* c : cells) {
        abs.push_back(c->abs_error);
        sgn.push_back(c->signed_diff);
    }
    return summarize(abs, sgn);
}

const JointError& ErrorReport::joint(Channel c, Side s) const {
    for (const JointError& j : joints) {
        if (j.channel == c && j.side == s) {
            return j;
        }
    }
    throw ValidationError("error report has no " + joint_label(c, s) + " entry");
}

std::vector<std::string> ErrorReport::subjects() const {
    std::vector<std::string> out;
    for (const ErrorCell& c : cells) {
        if (std::find(out.begin(), out.end(), c.key.subject_id) == out.end()) {
            out.push_back(c.key.subject_id);
        }
    }
    return out;
}

void ErrorReport::check_invariants() const {
    for (const ErrorCell& c : cells) {
        if (c.abs_error != std::abs(c.signed_diff) || c.signed_diff != c.candidate - c.truth) {
            throw std::logic_error("error report: inconsistent cell at " + describe(c.key));
        }
    }
    for (const JointError& j : joints) {
        check(j.pooled, joint_label(j.channel, j.side));
        check(j.balanced, joint_label(j.channel, j.side) + " (subject-balanced)");
    }
    for (const BinMean& b : bin_means) {
        for (const ErrorAggregate& a : b.bins) {
            check(a, joint_label(b.channel, b.side) + " bin");
        }
    }
}

ErrorReport compare(std::span<const StrideSummary> candidate, std::span<const StrideSummary> truth) {
    const auto cand = index_summaries(candidate, "candidate");
    const auto ref = index_summaries(truth, "truth");
    for (const auto& [k, s] : cand) {
        if (!ref.contains(k)) {
            throw ValidationError("truth set has no entry for " + describe(k));
        }
    }
    for (const auto& [k, s] : ref) {
        if (!cand.contains(k)) {
            throw ValidationError("candidate set has no entry for " + describe(k));
        }
    }
    if (cand.empty()) {
        throw ValidationError("compare: no stride summaries");
    }

    ErrorReport r;
    r.candidate_source = cand.begin()->second->source;
    r.truth_source = ref.begin()->second->source;
    for (const auto& [k, c] : cand) {
        const StrideSummary* t = ref.at(k);
        for (Channel ch : kAllChannels) {
            const auto ci = static_cast<std::size_t>(ch);
            for (std::size_t b = 0; b < kErrorBins; ++b) {
                ErrorCell cell;
                cell.key = k;
                cell.channel = ch;
                cell.bin = b;
                cell.candidate = c->mean[ci][b];
                cell.truth = t->mean[ci][b];
                cell.signed_diff = cell.candidate - cell.truth;
                cell.abs_error = std::abs(cell.signed_diff);
                r.cells.push_back(cell);
            }
        }
    }

    const std::vector<std::string> subjects = r.subjects();
    for (Side side : kBothSides) {
        for (Channel ch : kAllChannels) {
            JointError je;
            je.channel = ch;
            je.side = side;
            std::vector<const ErrorCell*> all;
            std::map<std::string, std::vector<const ErrorCell*>> by_subject;
            for (const ErrorCell& c : r.cells) {
                if (c.channel == ch && c.key.side == side) {
                    all.push_back(&c);
                    by_subject[c.key.subject_id].push_back(&c);
                }
            }
            je.pooled = aggregate(all);

            std::vector<double> subj_abs, subj_sgn;
            for (const std::string& s : subjects) {
                const auto it = by_subject.find(s);
                if (it == by_subject.end()) {
                    continue;
                }
                const ErrorAggregate a = aggregate(it->second);
                subj_abs.push_back(a.mean_abs);
                subj_sgn.push_back(a.mean_signed);

                SubjectCurve curve;
                curve.subject_id = s;
                curve.channel = ch;
                curve.side = side;
                std::array<std::size_t, kErrorBins> count{};
                for (const ErrorCell* c : it->second) {
                    curve.mean_abs[c->bin] += c->abs_error;
                    curve.mean_signed[c->bin] += c->signed_diff;
                    curve.mean_truth[c->bin] += c->truth;
                    curve.mean_candidate[c->bin] += c->candidate;
                    ++count[c->bin];
                }
                for (std::size_t b = 0; b < kErrorBins; ++b) {
                    const double n = static_cast<double>(count[b]);
                    curve.mean_abs[b] /= n;
                    curve.mean_signed[b] /= n;
                    curve.mean_truth[b] /= n;
                    curve.mean_candidate[b] /= n;
                }
                r.subject_curves.push_back(curve);
            }
            je.balanced = summarize(subj_abs, subj_sgn);
            r.joints.push_back(je);

            BinMean bm;
            bm.channel = ch;
            bm.side = side;
            for (std::size_t b = 0; b < kErrorBins; ++b) {
                std::vector<const ErrorCell*> in_bin;
                for (const ErrorCell* c : all) {
                    if (c->bin == b) {
                        in_bin.push_back(c);
                    }
                }
                bm.bins[b] = aggregate(in_bin);
            }
            r.bin_means.push_back(bm);
        }
    }
    r.check_invariants();
    return r;
}

CurveDifference mean_curve_difference(std::span<const StrideSummary> candidate, std::span<const StrideSummary> truth) {
    const ErrorReport r = compare(candidate, truth);
    CurveDifference d{};
    for (const JointError& j : r.joints) {
        d[static_cast<std::size_t>(j.channel)][static_cast<std::size_t>(j.side)] = j.pooled.mean_signed;
    }
    return d;
}

std::string ErrorReport::to_json() const {
    nlohmann::json j;
    j["candidate_source"] = candidate_source;
    j["truth_source"] = truth_source;
    j["percent"] = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90};
    j["n_cells"] = cells.size();
    for (const JointError& je : joints) {
        j["joints"][joint_label(je.channel, je.side)] = {{"pooled", strideflex::to_json(je.pooled)},
                                                         {"subject_balanced", strideflex::to_json(je.balanced)}};
    }
    for (const BinMean& b : bin_means) {
        nlohmann::json bins = nlohmann::json::array();
        for (const ErrorAggregate& a : b.bins) {
            bins.push_back(strideflex::to_json(a));
        }
        j["bins"][joint_label(b.channel, b.side)] = bins;
    }
    for (const SubjectCurve& c : subject_curves) {
        j["subjects"][c.subject_id][joint_label(c.channel, c.side)] = {{"mean_abs", c.mean_abs},
                                                                        {"mean_signed", c.mean_signed},
                                                                        {"mean_truth", c.mean_truth},
                                                                        {"mean_candidate", c.mean_candidate}};
    }
    return j.dump(2);
}

void write_error_cells_csv(std::ostream& out, const ErrorReport& r) {
    out << "subject,sprint,side,channel,percent,candidate,truth,signed_diff,abs_error\n";
    out << std::setprecision(10);
    for (const ErrorCell& c : r.cells) {
        out << c.key.subject_id << ',' << c.key.sprint_id << ',' << name_of(c.key.side) << ',' << name_of(c.channel)
            << ',' << c.bin * 10 << ',' << c.candidate << ',' << c.truth << ',' << c.signed_diff << ',' << c.abs_error
            << '\n';
    }
}

void write_joint_errors_csv(std::ostream& out, const ErrorReport& r) {
    out << "side,channel,n,mean_abs,sd_abs,sem_abs,mean_signed,sd_signed,sem_signed,"
           "subjects,balanced_mean_abs,balanced_sem_abs,balanced_mean_signed,balanced_sem_signed\n";
    out << std::setprecision(10);
    for (const JointError& j : r.joints) {
        const ErrorAggregate& p = j.pooled;
        const ErrorAggregate& b = j.balanced;
        out << name_of(j.side) << ',' << name_of(j.channel) << ',' << p.n << ',' << p.mean_abs << ',' << p.sd_abs << ','
            << p.sem_abs << ',' << p.mean_signed << ',' << p.sd_signed << ',' << p.sem_signed << ',' << b.n << ','
            << b.mean_abs << ',' << b.sem_abs << ',' << b.mean_signed << ',' << b.sem_signed << '\n';
    }
}

void write_subject_curves_csv(std::ostream& out, const ErrorReport& r) {
    out << "subject,side,channel,percent,mean_abs,mean_signed,mean_truth,mean_candidate\n";
    out << std::setprecision(10);
    for (const SubjectCurve& c : r.subject_curves) {
        for (std::size_t b = 0; b < kErrorBins; ++b) {
            out << c.subject_id << ',' << name_of(c.side) << ',' << name_of(c.channel) << ',' << b * 10 << ','
                << c.mean_abs[b] << ',' << c.mean_signed[b] << ',' << c.mean_truth[b] << ',' << c.mean_candidate[b]
                << '\n';
        }
    }
}

} // namespace strideflex
