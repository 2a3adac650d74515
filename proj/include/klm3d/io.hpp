#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klm3d/scenario.hpp"
#include "klm3d/simulate.hpp"
#include "klm3d/stats.hpp"

namespace klm3d {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// Parameter files overlay the built-in defaults: absent blocks and keys
// keep their default values, unknown keys are rejected.
std::string params_to_json(const OperatorParams& p);
OperatorParams params_from_json(const std::string& text);
OperatorParams load_params(const std::string& path);
void save_params(const OperatorParams& p, const std::string& path);

// Trial logs travel as CSV (one header line, ';'-joined phase lists) or
// JSONL with the same field names. load_logs picks the format by file
// extension, falling back to content sniffing.
std::string logs_to_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> logs_from_csv(const std::string& text);
std::string logs_to_jsonl(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> logs_from_jsonl(const std::string& text);
std::vector<TrialRecord> load_logs(const std::string& path);
void save_logs(const std::vector<TrialRecord>& records, const std::string& path);

// Predictions for one scenario; a predictions file can carry several.
struct PredictionSet {
    TaskKind task_kind = TaskKind::menu_selection;
    ModalityName modality = ModalityName::Controller;
    ScenarioPrediction prediction;
};

std::string predictions_to_json(const std::vector<PredictionSet>& sets);
std::vector<PredictionSet> predictions_from_json(const std::string& text);
std::vector<PredictionSet> load_predictions(const std::string& path);
std::string predictions_to_csv(const std::vector<PredictionSet>& sets);

// Average times per modality for ranking comparisons.
struct CompareAverages {
    std::map<ModalityName, double> predicted;
    std::map<ModalityName, double> actual;
};

CompareAverages averages_from_json(const std::string& text);
CompareAverages load_averages(const std::string& path);

// Extra provenance echoed into the report's config block.
struct ReportMeta {
    bool gate = false;
    std::optional<std::string> stamp;
};

std::string report_to_json(const EvalReport& report, const ReportMeta& meta);
std::string report_to_csv(const EvalReport& report);

// Calibration samples: CSV with header id,mt_ms or id,ctd_cm,mt_ms.
struct CalibrationSample {
    double id = 0.0;
    double ctd_cm = 0.0;
    double mt_ms = 0.0;
};

struct CalibrationData {
    std::vector<CalibrationSample> samples;
    bool has_ctd = false;
};

CalibrationData samples_from_csv(const std::string& text);
CalibrationData load_samples(const std::string& path);

} // namespace klm3d
