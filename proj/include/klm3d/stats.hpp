#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klm3d/scenario.hpp"

namespace klm3d {

// One logged trial joined with its prediction. Phase vectors may be empty
// when a log source does not carry phase detail.
struct TrialRecord {
    std::string participant_id;
    ModalityName modality = ModalityName::Controller;
    int trial_id = 0;
    double actual_total_ms = 0.0;
    double predicted_total_ms = 0.0;
    std::vector<double> actual_phase_ms;
    std::vector<double> predicted_phase_ms;
    bool failed = false;

    void validate() const;
};

// Denominator used when normalizing actual-vs-predicted differences.
enum class PctForm { symmetric, vs_predicted, vs_actual };

std::string to_string(PctForm form);
PctForm pct_form_from_string(const std::string& s);

// (actual - predicted) over the denominator selected by form.
double signed_percent_difference(double actual, double predicted, PctForm form);

// Magnitude of the above; the symmetric form is the reporting default.
double percent_difference(double actual, double predicted,
                          PctForm form = PctForm::symmetric);

struct FilterResult {
    std::vector<TrialRecord> kept;
    std::vector<TrialRecord> removed_failed;
    std::vector<TrialRecord> removed_outliers;
};

// Per modality: drops failed trials, then in a single pass drops records
// whose delta lies strictly more than sd_multiplier population standard
// deviations from the mean delta.
FilterResult remove_failed_and_outliers(const std::vector<TrialRecord>& records,
                                        double sd_multiplier = 2.0);

struct ZTestResult {
    double z = 0.0;
    double p = 0.0;
    double sd = 0.0;
    double d = 0.0;
};

// Paired Z-test on actual - predicted deltas with sample SD.
// z > 0 iff mean(actual) > mean(predicted).
ZTestResult paired_z_test(const std::vector<double>& actual,
                          const std::vector<double>& predicted);

enum class EffectBand { negligible, small, medium, large };

EffectBand effect_band(double cohens_d);
std::string to_string(EffectBand band);

struct TostResult {
    double t = 0.0;
    double p = 0.0;
    double sd = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool equivalent = false;
};

// Two one-sided t-tests against symmetric bounds, with the 90% CI that
// yields the same verdict as p < 0.05. The reported t belongs to the side
// with the larger p. With zero variance the verdict follows the mean alone.
TostResult tost_equivalence(const std::vector<double>& pct_diffs, double bound = 0.20);

// Ascending rank by average time, 1 = fastest; exact ties share the lower
// rank number.
std::map<ModalityName, int> rank_modalities(const std::map<ModalityName, double>& avg_times);

double mean_rank_difference(const std::map<ModalityName, int>& predicted_ranks,
                            const std::map<ModalityName, int>& actual_ranks);

struct PairwiseAccuracy {
    int n_correct = 0;
    int n_total = 0;
    double rate = 0.0;
};

// Over all unordered modality pairs, counts a pair correct iff predicted
// and actual averages order it the same way; any tie counts as incorrect.
PairwiseAccuracy pairwise_prediction_accuracy(
    const std::map<ModalityName, double>& predicted_avgs,
    const std::map<ModalityName, double>& actual_avgs);

struct LinearFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
};

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);

struct IdCritFit {
    double id_crit = 0.0;
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
};

// Sweeps candidate thresholds over the sorted unique ID values, fits the
// points at or above each, and keeps the threshold with the best r2
// (smallest threshold on ties).
IdCritFit fit_id_crit(const std::vector<std::pair<double, double>>& points);

struct HandFitRow {
    double id_bits = 0.0;
    double ctd_cm = 0.0;
    double mt_ms = 0.0;
};

struct HandFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double r2 = 0.0;
};

HandFit fit_hand_model(const std::vector<HandFitRow>& rows);

struct EvalOptions {
    PctForm pct_form = PctForm::symmetric;
    PctForm tost_reference = PctForm::vs_predicted;
    double bound = 0.20;
    double outlier_sd = 2.0;
};

struct ModalityEval {
    ModalityName modality = ModalityName::Controller;
    int n_kept = 0;
    int n_outliers = 0;
    int n_failed = 0;
    double total_actual_ms = 0.0;
    double total_predicted_ms = 0.0;
    double mean_actual_ms = 0.0;
    double mean_predicted_ms = 0.0;
    double percent_difference = 0.0;
    // Absent when the filtered deltas have zero variance.
    std::optional<ZTestResult> z_test;
    std::optional<EffectBand> band;
    TostResult tost;
    int predicted_rank = 1;
    int actual_rank = 1;
};

struct EvalReport {
    EvalOptions options;
    std::vector<ModalityEval> modalities;
    double mean_rank_diff = 0.0;
    PairwiseAccuracy pairwise;
};

// Full evaluation pipeline over joined trial records. The parallel entry
// point and the serial reference produce bit-identical reports.
EvalReport evaluate_logs(const std::vector<TrialRecord>& records,
                         const EvalOptions& options = {});
EvalReport evaluate_logs_serial(const std::vector<TrialRecord>& records,
                                const EvalOptions& options = {});

} // namespace klm3d
