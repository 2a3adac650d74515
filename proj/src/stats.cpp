#include "klm3d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>

#include "klm3d/distributions.hpp"

namespace klm3d {

void TrialRecord::validate() const {
    if (participant_id.empty()) throw SchemaError("participant_id must be nonempty");
    if (!std::isfinite(actual_total_ms) || !std::isfinite(predicted_total_ms))
        throw SchemaError("trial times must be finite");
    if (!failed && !(actual_total_ms > 0.0))
        throw SchemaError("actual_total_ms must be > 0 for completed trials");
    if (!(predicted_total_ms > 0.0)) throw SchemaError("predicted_total_ms must be > 0");
}

std::string to_string(PctForm form) {
    switch (form) {
        case PctForm::symmetric: return "symmetric";
        case PctForm::vs_predicted: return "vs-predicted";
        case PctForm::vs_actual: return "vs-actual";
    }
    throw SchemaError("unknown percent-difference form");
}

PctForm pct_form_from_string(const std::string& s) {
    if (s == "symmetric") return PctForm::symmetric;
    if (s == "vs-predicted") return PctForm::vs_predicted;
    if (s == "vs-actual") return PctForm::vs_actual;
    throw SchemaError("unknown percent-difference form '" + s + "'");
}

double signed_percent_difference(double actual, double predicted, PctForm form) {
    if (!(actual > 0.0) || !(predicted > 0.0))
        throw SchemaError("percent difference requires positive times");
    switch (form) {
        case PctForm::symmetric: return (actual - predicted) / ((actual + predicted) / 2.0);
        case PctForm::vs_predicted: return (actual - predicted) / predicted;
        case PctForm::vs_actual: return (actual - predicted) / actual;
    }
    throw SchemaError("unknown percent-difference form");
}

double percent_difference(double actual, double predicted, PctForm form) {
    return std::fabs(signed_percent_difference(actual, predicted, form));
}

namespace {

long double mean_of(const std::vector<double>& xs) {
    long double s = 0.0L;
    for (double x : xs) s += x;
    return s / static_cast<long double>(xs.size());
}

// Population (divide by n) or sample (divide by n-1) standard deviation.
long double sd_of(const std::vector<double>& xs, bool sample) {
    const long double m = mean_of(xs);
    long double ss = 0.0L;
    for (double x : xs) {
        const long double d = static_cast<long double>(x) - m;
        ss += d * d;
    }
    const long double denom =
        sample ? static_cast<long double>(xs.size() - 1) : static_cast<long double>(xs.size());
    return std::sqrt(ss / denom);
}

} // namespace

FilterResult remove_failed_and_outliers(const std::vector<TrialRecord>& records,
                                        double sd_multiplier) {
    if (!(sd_multiplier > 0.0)) throw SchemaError("SD multiplier must be > 0");
    if (records.empty()) throw InsufficientData("no trial records");
    for (const auto& r : records) r.validate();

    std::map<ModalityName, std::vector<double>> deltas;
    for (const auto& r : records)
        if (!r.failed) deltas[r.modality].push_back(r.actual_total_ms - r.predicted_total_ms);

    struct Cut {
        long double mean;
        long double threshold;
    };
    std::map<ModalityName, Cut> cuts;
    for (const auto& [modality, d] : deltas) {
        if (d.empty()) continue;
        cuts[modality] = Cut{mean_of(d), sd_multiplier * sd_of(d, /*sample=*/false)};
    }

    FilterResult out;
    std::map<ModalityName, int> kept_count;
    for (const auto& r : records) {
        if (r.failed) {
            out.removed_failed.push_back(r);
            continue;
        }
        const Cut& cut = cuts.at(r.modality);
        const long double delta = static_cast<long double>(r.actual_total_ms) -
                                  static_cast<long double>(r.predicted_total_ms);
        if (std::fabs(delta - cut.mean) > cut.threshold) {
            out.removed_outliers.push_back(r);
        } else {
            out.kept.push_back(r);
            ++kept_count[r.modality];
        }
    }
    for (const auto& [modality, d] : deltas)
        if (kept_count[modality] < 3)
            throw InsufficientData("fewer than 3 records remain for modality " +
                                   to_string(modality));
    return out;
}

ZTestResult paired_z_test(const std::vector<double>& actual,
                          const std::vector<double>& predicted) {
    if (actual.size() != predicted.size())
        throw SchemaError("paired samples must have equal length");
    if (actual.size() < 2) throw InsufficientData("paired Z-test requires n >= 2");
    std::vector<double> deltas(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) deltas[i] = actual[i] - predicted[i];
    const long double m = mean_of(deltas);
    const long double sd = sd_of(deltas, /*sample=*/true);
    if (sd == 0.0L) throw ZeroVariance("paired deltas have zero variance");
    ZTestResult r;
    r.sd = static_cast<double>(sd);
    r.z = static_cast<double>(m / (sd / std::sqrt(static_cast<long double>(deltas.size()))));
    r.p = 2.0 * (1.0 - normal_cdf(std::fabs(r.z)));
    r.d = static_cast<double>(m / sd);
    return r;
}

EffectBand effect_band(double cohens_d) {
    const double mag = std::fabs(cohens_d);
    if (mag < 0.2) return EffectBand::negligible;
    if (mag < 0.5) return EffectBand::small;
    if (mag < 0.8) return EffectBand::medium;
    return EffectBand::large;
}

std::string to_string(EffectBand band) {
    switch (band) {
        case EffectBand::negligible: return "negligible";
        case EffectBand::small: return "small";
        case EffectBand::medium: return "medium";
        case EffectBand::large: return "large";
    }
    throw SchemaError("unknown effect band");
}

namespace {

// (m +- bound)/se with the zero-variance limit taken by sign.
double t_ratio(double numerator, double se) {
    if (se > 0.0) return numerator / se;
    if (numerator > 0.0) return std::numeric_limits<double>::infinity();
    if (numerator < 0.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
}

} // namespace

TostResult tost_equivalence(const std::vector<double>& pct_diffs, double bound) {
    if (!(bound > 0.0)) throw SchemaError("equivalence bound must be > 0");
    if (pct_diffs.size() < 3) throw InsufficientData("TOST requires n >= 3");
    const std::size_t n = pct_diffs.size();
    const double df = static_cast<double>(n - 1);
    const double m = static_cast<double>(mean_of(pct_diffs));
    const double s = static_cast<double>(sd_of(pct_diffs, /*sample=*/true));
    const double se = s / std::sqrt(static_cast<double>(n));

    const double t_lower = t_ratio(m + bound, se);
    const double t_upper = t_ratio(m - bound, se);
    const double p_lower = 1.0 - students_t_cdf(t_lower, df);
    const double p_upper = students_t_cdf(t_upper, df);

    TostResult r;
    r.sd = s;
    r.p = std::max(p_lower, p_upper);
    r.t = p_lower >= p_upper ? t_lower : t_upper;
    const double q = students_t_quantile(0.95, df);
    r.ci_low = m - q * se;
    r.ci_high = m + q * se;
    r.equivalent = r.p < 0.05;
    return r;
}

std::map<ModalityName, int> rank_modalities(const std::map<ModalityName, double>& avg_times) {
    if (avg_times.size() < 2)
        throw InsufficientModalities("ranking requires at least 2 modalities");
    std::map<ModalityName, int> ranks;
    for (const auto& [modality, time] : avg_times) {
        int rank = 1;
        for (const auto& [other, other_time] : avg_times) {
            (void)other;
            if (other_time < time) ++rank;
        }
        ranks[modality] = rank;
    }
    return ranks;
}

double mean_rank_difference(const std::map<ModalityName, int>& predicted_ranks,
                            const std::map<ModalityName, int>& actual_ranks) {
    if (predicted_ranks.size() != actual_ranks.size())
        throw JoinError("rank maps cover different modality sets");
    if (predicted_ranks.empty()) throw InsufficientModalities("no ranks to compare");
    long double total = 0.0L;
    for (const auto& [modality, rank] : predicted_ranks) {
        const auto it = actual_ranks.find(modality);
        if (it == actual_ranks.end())
            throw JoinError("rank maps cover different modality sets");
        total += std::abs(rank - it->second);
    }
    return static_cast<double>(total / static_cast<long double>(predicted_ranks.size()));
}

PairwiseAccuracy pairwise_prediction_accuracy(
    const std::map<ModalityName, double>& predicted_avgs,
    const std::map<ModalityName, double>& actual_avgs) {
    if (predicted_avgs.size() != actual_avgs.size())
        throw JoinError("average-time maps cover different modality sets");
    for (const auto& [modality, value] : predicted_avgs)
        if (!actual_avgs.count(modality))
            throw JoinError("average-time maps cover different modality sets");
    if (predicted_avgs.size() < 2)
        throw InsufficientModalities("pairwise accuracy requires at least 2 modalities");

    PairwiseAccuracy acc;
    for (auto i = predicted_avgs.begin(); i != predicted_avgs.end(); ++i) {
        for (auto j = std::next(i); j != predicted_avgs.end(); ++j) {
            ++acc.n_total;
            const double dp = i->second - j->second;
            const double da = actual_avgs.at(i->first) - actual_avgs.at(j->first);
            if (dp != 0.0 && da != 0.0 && std::signbit(dp) == std::signbit(da))
                ++acc.n_correct;
        }
    }
    acc.rate = static_cast<double>(acc.n_correct) / static_cast<double>(acc.n_total);
    return acc;
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw SchemaError("x/y lengths differ");
    if (xs.size() < 2) throw DegenerateRegression("linear fit requires n >= 2");
    const std::size_t n = xs.size();
    const long double mx = mean_of(xs);
    const long double my = mean_of(ys);
    long double sxx = 0.0L, sxy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if (sxx == 0.0L) throw DegenerateRegression("all x values are equal");
    const long double b = sxy / sxx;
    const long double a = my - b * mx;
    long double ss_res = 0.0L, ss_tot = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double r = ys[i] - (a + b * xs[i]);
        const long double dy = ys[i] - my;
        ss_res += r * r;
        ss_tot += dy * dy;
    }
    LinearFit fit;
    fit.a = static_cast<double>(a);
    fit.b = static_cast<double>(b);
    fit.r2 = ss_tot == 0.0L ? 1.0 : static_cast<double>(1.0L - ss_res / ss_tot);
    return fit;
}

IdCritFit fit_id_crit(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> unique_ids;
    unique_ids.reserve(points.size());
    for (const auto& [id, mt] : points) unique_ids.push_back(id);
    std::sort(unique_ids.begin(), unique_ids.end());
    unique_ids.erase(std::unique(unique_ids.begin(), unique_ids.end()), unique_ids.end());
    if (unique_ids.size() < 5)
        throw DegenerateRegression("threshold sweep requires >= 5 distinct ID values");

    bool found = false;
    IdCritFit best;
    std::vector<double> xs, ys;
    for (double candidate : unique_ids) {
        xs.clear();
        ys.clear();
        for (const auto& [id, mt] : points) {
            if (id >= candidate) {
                xs.push_back(id);
                ys.push_back(mt);
            }
        }
        if (xs.size() < 3) continue;
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        if (*lo == *hi) continue;
        const LinearFit fit = fit_linear(xs, ys);
        if (!found || fit.r2 > best.r2) {
            found = true;
            best = IdCritFit{candidate, fit.a, fit.b, fit.r2};
        }
    }
    if (!found)
        throw DegenerateRegression("no candidate threshold leaves a fittable subset");
    return best;
}

HandFit fit_hand_model(const std::vector<HandFitRow>& rows) {
    if (rows.size() < 4) throw DegenerateRegression("hand-model fit requires n >= 4");
    // Normal equations for y = a + b*id + c*ctd.
    long double ata[3][3] = {};
    long double aty[3] = {};
    for (const auto& row : rows) {
        const long double x[3] = {1.0L, row.id_bits, row.ctd_cm};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) ata[i][j] += x[i] * x[j];
            aty[i] += x[i] * row.mt_ms;
        }
    }

    long double scale = 0.0L;
    for (const auto& r : ata)
        for (long double v : r) scale = std::max(scale, std::fabs(v));
    const long double pivot_tolerance = 1e-10L * scale;

    // Gaussian elimination with partial pivoting.
    long double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = ata[i][j];
        m[i][3] = aty[i];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (std::fabs(m[pivot][col]) <= pivot_tolerance)
            throw DegenerateRegression("design matrix is rank deficient");
        if (pivot != col)
            for (int j = 0; j < 4; ++j) std::swap(m[pivot][j], m[col][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const long double f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
        }
    }
    const long double a = m[0][3] / m[0][0];
    const long double b = m[1][3] / m[1][1];
    const long double c = m[2][3] / m[2][2];

    long double my = 0.0L;
    for (const auto& row : rows) my += row.mt_ms;
    my /= static_cast<long double>(rows.size());
    long double ss_res = 0.0L, ss_tot = 0.0L;
    for (const auto& row : rows) {
        const long double r = row.mt_ms - (a + b * row.id_bits + c * row.ctd_cm);
        const long double dy = row.mt_ms - my;
        ss_res += r * r;
        ss_tot += dy * dy;
    }
    HandFit fit;
    fit.a = static_cast<double>(a);
    fit.b = static_cast<double>(b);
    fit.c = static_cast<double>(c);
    fit.r2 = ss_tot == 0.0L ? 1.0 : static_cast<double>(1.0L - ss_res / ss_tot);
    return fit;
}

namespace {

void validate_options(const EvalOptions& options) {
    if (!(options.bound > 0.0) || !(options.bound < 1.0))
        throw SchemaError("equivalence bound must lie in (0, 1)");
    if (!(options.outlier_sd > 0.0)) throw SchemaError("outlier SD multiplier must be > 0");
}

struct ModalityGroup {
    ModalityName modality;
    std::vector<const TrialRecord*> kept;
    int n_failed = 0;
    int n_outliers = 0;
};

std::vector<ModalityGroup> group_by_modality(const FilterResult& filtered) {
    std::map<ModalityName, ModalityGroup> groups;
    for (const auto& r : filtered.kept) {
        groups[r.modality].modality = r.modality;
        groups[r.modality].kept.push_back(&r);
    }
    for (const auto& r : filtered.removed_failed) {
        groups[r.modality].modality = r.modality;
        ++groups[r.modality].n_failed;
    }
    for (const auto& r : filtered.removed_outliers) {
        groups[r.modality].modality = r.modality;
        ++groups[r.modality].n_outliers;
    }
    std::vector<ModalityGroup> out;
    out.reserve(groups.size());
    for (auto& [modality, group] : groups) out.push_back(std::move(group));
    return out;
}

ModalityEval evaluate_group(const ModalityGroup& group, const EvalOptions& options) {
    ModalityEval eval;
    eval.modality = group.modality;
    eval.n_kept = static_cast<int>(group.kept.size());
    eval.n_failed = group.n_failed;
    eval.n_outliers = group.n_outliers;

    std::vector<double> actual, predicted, pct;
    actual.reserve(group.kept.size());
    predicted.reserve(group.kept.size());
    pct.reserve(group.kept.size());
    long double total_a = 0.0L, total_p = 0.0L;
    for (const TrialRecord* r : group.kept) {
        actual.push_back(r->actual_total_ms);
        predicted.push_back(r->predicted_total_ms);
        pct.push_back(signed_percent_difference(r->actual_total_ms, r->predicted_total_ms,
                                                options.tost_reference));
        total_a += r->actual_total_ms;
        total_p += r->predicted_total_ms;
    }
    eval.total_actual_ms = static_cast<double>(total_a);
    eval.total_predicted_ms = static_cast<double>(total_p);
    eval.mean_actual_ms = eval.total_actual_ms / static_cast<double>(group.kept.size());
    eval.mean_predicted_ms = eval.total_predicted_ms / static_cast<double>(group.kept.size());
    eval.percent_difference =
        percent_difference(eval.total_actual_ms, eval.total_predicted_ms, options.pct_form);
    try {
        eval.z_test = paired_z_test(actual, predicted);
        eval.band = effect_band(eval.z_test->d);
    } catch (const ZeroVariance&) {
        eval.z_test.reset();
        eval.band.reset();
    }
    eval.tost = tost_equivalence(pct, options.bound);
    return eval;
}

EvalReport assemble_report(std::vector<ModalityEval>&& evals, const EvalOptions& options) {
    EvalReport report;
    report.options = options;
    report.modalities = std::move(evals);
    if (report.modalities.size() >= 2) {
        std::map<ModalityName, double> mean_predicted, mean_actual;
        for (const auto& e : report.modalities) {
            mean_predicted[e.modality] = e.mean_predicted_ms;
            mean_actual[e.modality] = e.mean_actual_ms;
        }
        const auto predicted_ranks = rank_modalities(mean_predicted);
        const auto actual_ranks = rank_modalities(mean_actual);
        for (auto& e : report.modalities) {
            e.predicted_rank = predicted_ranks.at(e.modality);
            e.actual_rank = actual_ranks.at(e.modality);
        }
        report.mean_rank_diff = mean_rank_difference(predicted_ranks, actual_ranks);
        report.pairwise = pairwise_prediction_accuracy(mean_predicted, mean_actual);
    }
    return report;
}

} // namespace

EvalReport evaluate_logs(const std::vector<TrialRecord>& records, const EvalOptions& options) {
    validate_options(options);
    const FilterResult filtered = remove_failed_and_outliers(records, options.outlier_sd);
    const std::vector<ModalityGroup> groups = group_by_modality(filtered);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(groups.size());
    std::vector<ModalityEval> evals(groups.size());
    std::vector<std::exception_ptr> failures(groups.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            evals[i] = evaluate_group(groups[i], options);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return assemble_report(std::move(evals), options);
}

EvalReport evaluate_logs_serial(const std::vector<TrialRecord>& records,
                                const EvalOptions& options) {
    validate_options(options);
    const FilterResult filtered = remove_failed_and_outliers(records, options.outlier_sd);
    const std::vector<ModalityGroup> groups = group_by_modality(filtered);
    std::vector<ModalityEval> evals;
    evals.reserve(groups.size());
    for (const auto& group : groups) evals.push_back(evaluate_group(group, options));
    return assemble_report(std::move(evals), options);
}

} // namespace klm3d
