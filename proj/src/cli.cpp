#include "klm3d/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "json.hpp"

#include "klm3d/io.hpp"
#include "klm3d/scenario.hpp"
#include "klm3d/simulate.hpp"
#include "klm3d/stats.hpp"
#include "klm3d/svg.hpp"

namespace klm3d {

namespace {

using ojson = nlohmann::ordered_json;

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    write_text_file(out_path, content);
}

std::string replace_extension(const std::string& path, const char* ext) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ext;
    return path.substr(0, dot) + ext;
}

OperatorParams resolve_params(const RunConfig& config) {
    if (!config.params_path.empty()) return load_params(config.params_path);
    if (const char* env = std::getenv("KLM3D_PARAMS"); env != nullptr && env[0] != '\0')
        return load_params(env);
    return OperatorParams::defaults();
}

Scenario resolve_scenario(const RunConfig& config) {
    if (config.scenario_path.empty())
        throw SchemaError(config.subcommand + " requires --scenario");
    return load_scenario(config.scenario_path);
}

NoiseSpec parse_noise(const RunConfig& config) {
    NoiseSpec noise;
    const std::string& text = config.noise;
    const std::size_t colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    noise.kind = noise_kind_from_string(kind);
    if (colon != std::string::npos) {
        const std::string scale = text.substr(colon + 1);
        char* end = nullptr;
        noise.scale = std::strtod(scale.c_str(), &end);
        if (scale.empty() || end != scale.c_str() + scale.size())
            throw SchemaError("--noise scale is not a number: '" + scale + "'");
    } else if (noise.kind == NoiseKind::none) {
        noise.scale = 0.0;
    }
    noise.failure_rate = config.failure_rate;
    noise.outlier_rate = config.outlier_rate;
    noise.outlier_multiplier = config.outlier_multiplier;
    noise.validate();
    return noise;
}

EvalOptions parse_eval_options(const RunConfig& config) {
    EvalOptions options;
    options.pct_form = pct_form_from_string(config.pct_form);
    options.tost_reference = pct_form_from_string(config.tost_ref);
    options.bound = config.bound;
    options.outlier_sd = config.outlier_sd;
    return options;
}

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

void cmd_generate(const RunConfig& config) {
    const ModalityName modality = modality_from_string(config.modality);
    const OperatorParams params = resolve_params(config);
    Scenario scenario;
    if (config.task == "menu" || config.task == "menu_selection")
        scenario = generate_menu_scenario(modality, MenuLayout{}, params);
    else if (config.task == "manipulation")
        scenario = generate_manipulation_scenario(modality, config.seed,
                                                  ManipulationLayout{}, params);
    else
        throw SchemaError("unknown task '" + config.task +
                          "' (expected menu or manipulation)");
    scenario.validate();
    emit(scenario_to_json(scenario), config.out_path);
}

void cmd_predict(const RunConfig& config) {
    const Scenario scenario = resolve_scenario(config);
    const OperatorParams params = resolve_params(config);
    PredictionSet set;
    set.task_kind = scenario.task_kind;
    set.modality = scenario.modality;
    set.prediction = predict_scenario(scenario, params);
    const std::vector<PredictionSet> sets{set};
    if (config.out_path.empty()) {
        emit(predictions_to_json(sets), "");
        return;
    }
    write_text_file(replace_extension(config.out_path, ".json"), predictions_to_json(sets));
    write_text_file(replace_extension(config.out_path, ".csv"), predictions_to_csv(sets));
}

void cmd_simulate(const RunConfig& config) {
    const Scenario scenario = resolve_scenario(config);
    const OperatorParams params = resolve_params(config);
    const NoiseSpec noise = parse_noise(config);
    const std::vector<TrialRecord> records =
        simulate_logs(scenario, params, noise, config.seed, config.participants);
    if (config.out_path.empty())
        emit(logs_to_csv(records), "");
    else
        save_logs(records, config.out_path);
}

// Overwrites the predicted columns of each record from the join source,
// keyed on (modality, trial id). Predictions hold no participant, so one
// prediction serves every participant of a trial.
void apply_predictions(std::vector<TrialRecord>& records,
                       const std::vector<PredictionSet>& sets) {
    std::map<std::pair<ModalityName, int>, const ScenarioPrediction::Trial*> index;
    for (const auto& set : sets)
        for (const auto& trial : set.prediction.trials)
            index[{set.modality, trial.trial_id}] = &trial;
    std::vector<std::string> unmatched;
    for (auto& r : records) {
        const auto it = index.find({r.modality, r.trial_id});
        if (it == index.end()) {
            if (unmatched.size() < 10)
                unmatched.push_back(to_string(r.modality) + "/" +
                                    std::to_string(r.trial_id));
            else if (unmatched.size() == 10)
                unmatched.push_back("...");
            continue;
        }
        r.predicted_total_ms = it->second->total_ms;
        r.predicted_phase_ms = it->second->per_phase_ms;
    }
    if (!unmatched.empty()) {
        std::string msg = "no prediction for trial ids:";
        for (const auto& u : unmatched) msg += " " + u;
        throw JoinError(msg);
    }
}

void cmd_evaluate(const RunConfig& config) {
    if (config.log_paths.empty()) throw SchemaError("evaluate requires --logs");
    std::vector<TrialRecord> records;
    for (const auto& path : config.log_paths) {
        std::vector<TrialRecord> part = load_logs(path);
        records.insert(records.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
    }
    if (!config.scenario_path.empty() && !config.predictions_path.empty())
        throw SchemaError("pass either --scenario or --predictions, not both");
    if (!config.scenario_path.empty()) {
        const Scenario scenario = load_scenario(config.scenario_path);
        const OperatorParams params = resolve_params(config);
        PredictionSet set;
        set.task_kind = scenario.task_kind;
        set.modality = scenario.modality;
        set.prediction = predict_scenario(scenario, params);
        apply_predictions(records, {set});
    } else if (!config.predictions_path.empty()) {
        apply_predictions(records, load_predictions(config.predictions_path));
    } else {
        std::vector<std::string> missing;
        for (const auto& r : records) {
            if (r.predicted_total_ms > 0.0) continue;
            if (missing.size() < 10)
                missing.push_back(to_string(r.modality) + "/" + std::to_string(r.trial_id));
            else if (missing.size() == 10)
                missing.push_back("...");
        }
        if (!missing.empty()) {
            std::string msg =
                "records lack embedded predictions (pass --scenario or --predictions):";
            for (const auto& m : missing) msg += " " + m;
            throw JoinError(msg);
        }
    }
    const EvalOptions options = parse_eval_options(config);
    const EvalReport report = evaluate_logs(records, options);
    ReportMeta meta;
    meta.gate = config.gate;
    if (config.stamp) meta.stamp = iso_utc_now();
    if (config.out_path.empty()) {
        emit(report_to_json(report, meta), "");
    } else {
        write_text_file(replace_extension(config.out_path, ".json"),
                        report_to_json(report, meta));
        write_text_file(replace_extension(config.out_path, ".csv"), report_to_csv(report));
        save_svg_chart(report, replace_extension(config.out_path, ".svg"));
    }
    if (config.gate) {
        std::vector<std::string> failing;
        for (const auto& m : report.modalities)
            if (!m.tost.equivalent) failing.push_back(to_string(m.modality));
        if (!failing.empty()) {
            std::string msg = "equivalence gate failed for:";
            for (const auto& f : failing) msg += " " + f;
            throw GateFailure(msg);
        }
    }
}

void cmd_compare(const RunConfig& config) {
    if (config.averages_path.empty()) throw SchemaError("compare requires --averages");
    const CompareAverages averages = load_averages(config.averages_path);
    const std::map<ModalityName, int> predicted_ranks = rank_modalities(averages.predicted);
    const std::map<ModalityName, int> actual_ranks = rank_modalities(averages.actual);
    const double rank_diff = mean_rank_difference(predicted_ranks, actual_ranks);
    const PairwiseAccuracy pairwise =
        pairwise_prediction_accuracy(averages.predicted, averages.actual);
    ojson o;
    o["schema"] = "klm3d-ranking-v1";
    ojson modalities = ojson::array();
    for (const auto& [modality, predicted] : averages.predicted) {
        ojson e;
        e["modality"] = to_string(modality);
        e["predicted"] = predicted;
        e["actual"] = averages.actual.at(modality);
        e["predicted_rank"] = predicted_ranks.at(modality);
        e["actual_rank"] = actual_ranks.at(modality);
        modalities.push_back(std::move(e));
    }
    o["modalities"] = std::move(modalities);
    o["mean_rank_diff"] = rank_diff;
    ojson pw;
    pw["n_correct"] = pairwise.n_correct;
    pw["n_total"] = pairwise.n_total;
    pw["rate"] = pairwise.rate;
    o["pairwise"] = std::move(pw);
    emit(o.dump(2) + "\n", config.out_path);
}

void cmd_calibrate(const RunConfig& config) {
    if (config.samples_path.empty()) throw SchemaError("calibrate requires --samples");
    const CalibrationData data = load_samples(config.samples_path);
    const ModelKind kind = model_kind_from_string(config.model_kind);
    OperatorParams params = OperatorParams::defaults();
    if (kind == ModelKind::hand) {
        if (!data.has_ctd)
            throw SchemaError("hand calibration needs the id,ctd_cm,mt_ms sample format");
        std::vector<HandFitRow> rows;
        rows.reserve(data.samples.size());
        for (const auto& s : data.samples) rows.push_back({s.id, s.ctd_cm, s.mt_ms});
        const HandFit fit = fit_hand_model(rows);
        params.hand.a_ms = fit.a;
        params.hand.b_ms_per_bit = fit.b;
        params.hand.c_ms_per_cm = fit.c;
    } else if (kind == ModelKind::distal_pointing) {
        std::vector<double> xs;
        std::vector<double> ys;
        xs.reserve(data.samples.size());
        ys.reserve(data.samples.size());
        for (const auto& s : data.samples) {
            xs.push_back(s.id);
            ys.push_back(s.mt_ms);
        }
        const LinearFit fit = fit_linear(xs, ys);
        params.distal.a_s = fit.a / 1000.0;
        params.distal.b_s_per_bit = fit.b / 1000.0;
    } else {
        std::vector<std::pair<double, double>> points;
        points.reserve(data.samples.size());
        for (const auto& s : data.samples) points.emplace_back(s.id, s.mt_ms);
        const IdCritFit fit = fit_id_crit(points);
        params.gaze.id_crit_bits = fit.id_crit;
        params.gaze.a_ms = fit.a;
        params.gaze.b_ms_per_bit = fit.b;
        double below_sum = 0.0;
        int below_n = 0;
        for (const auto& s : data.samples) {
            if (s.id < fit.id_crit) {
                below_sum += s.mt_ms;
                ++below_n;
            }
        }
        if (below_n > 0) params.gaze.saccade_ms = below_sum / below_n;
    }
    params.validate();
    emit(params_to_json(params), config.out_path);
}

} // namespace

int run_command(const RunConfig& config) {
    try {
        if (config.subcommand == "generate")
            cmd_generate(config);
        else if (config.subcommand == "predict")
            cmd_predict(config);
        else if (config.subcommand == "simulate")
            cmd_simulate(config);
        else if (config.subcommand == "evaluate")
            cmd_evaluate(config);
        else if (config.subcommand == "compare")
            cmd_compare(config);
        else if (config.subcommand == "calibrate")
            cmd_calibrate(config);
        else
            throw SchemaError("unknown subcommand '" + config.subcommand + "'");
    } catch (const GateFailure& e) {
        std::fprintf(stderr, "klm3d: %s\n", e.what());
        return 4;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "klm3d: %s\n", e.what());
        return 2;
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "klm3d: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "klm3d: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "klm3d: %s\n", e.what());
        return 3;
    }
    return 0;
}

} // namespace klm3d
