#include "CLI11.hpp"

#include "klm3d/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Task-time prediction and evaluation toolkit for 3D selection techniques"};
    app.require_subcommand(1);

    klm3d::RunConfig config;

    CLI::App* generate =
        app.add_subcommand("generate", "Write a scenario file for a task and modality");
    generate->add_option("task", config.task, "Task kind: menu or manipulation")->required();
    generate->add_option("--modality", config.modality,
                         "Interaction modality (default Controller)");
    generate->add_option("--seed", config.seed, "Seed for randomized scenario layout");
    generate->add_option("--params", config.params_path, "Operator parameter file (JSON)");
    generate->add_option("--out", config.out_path, "Output scenario file (default stdout)");

    CLI::App* predict =
        app.add_subcommand("predict", "Predict per-trial and total times for a scenario");
    predict->add_option("--scenario", config.scenario_path, "Scenario file (JSON)")
        ->required();
    predict->add_option("--params", config.params_path,
                        "Operator parameter file; falls back to $KLM3D_PARAMS, then "
                        "built-in defaults");
    predict->add_option("--out", config.out_path,
                        "Output base path; writes .json and .csv siblings");

    CLI::App* simulate =
        app.add_subcommand("simulate", "Generate synthetic trial logs around predictions");
    simulate->add_option("--scenario", config.scenario_path, "Scenario file (JSON)")
        ->required();
    simulate->add_option("--params", config.params_path, "Operator parameter file (JSON)");
    simulate->add_option("--noise", config.noise,
                         "Noise spec kind[:scale], kind in {none,gaussian,lognormal}");
    simulate->add_option("--failure-rate", config.failure_rate,
                         "Fraction of trials marked failed");
    simulate->add_option("--outlier-rate", config.outlier_rate,
                         "Fraction of trials inflated as outliers");
    simulate->add_option("--outlier-multiplier", config.outlier_multiplier,
                         "Time multiplier applied to outlier trials");
    simulate->add_option("--participants", config.participants,
                         "Number of synthetic participants");
    simulate->add_option("--seed", config.seed, "Noise stream seed");
    simulate->add_option("--out", config.out_path,
                         "Output log file, .csv or .jsonl (default CSV on stdout)");

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Run the statistics pipeline over trial logs");
    evaluate->add_option("--logs", config.log_paths, "Trial log file(s), CSV or JSONL")
        ->required();
    evaluate->add_option("--scenario", config.scenario_path,
                         "Scenario to predict and join against the logs");
    evaluate->add_option("--predictions", config.predictions_path,
                         "Prediction file to join against the logs");
    evaluate->add_option("--params", config.params_path, "Operator parameter file (JSON)");
    evaluate->add_option("--pct-form", config.pct_form,
                         "Percent difference form: symmetric, vs-predicted, or vs-actual");
    evaluate->add_option("--tost-ref", config.tost_ref,
                         "Reference for TOST percent differences: vs-predicted, "
                         "vs-actual, or symmetric");
    evaluate->add_option("--bound", config.bound, "Equivalence bound as a fraction");
    evaluate->add_option("--outlier-sd", config.outlier_sd,
                         "Outlier cut in standard deviations");
    evaluate->add_flag("--gate", config.gate,
                       "Exit nonzero when any modality fails equivalence");
    evaluate->add_flag("--stamp", config.stamp, "Embed a UTC timestamp in the report");
    evaluate->add_option("--out", config.out_path,
                         "Output base path; writes .json, .csv and .svg siblings");

    CLI::App* compare =
        app.add_subcommand("compare", "Rank modalities by average predicted and actual time");
    compare->add_option("--averages", config.averages_path,
                        "Per-modality average times (JSON)")
        ->required();
    compare->add_option("--out", config.out_path, "Output ranking file (default stdout)");

    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Fit operator-model coefficients from samples");
    calibrate->add_option("--samples", config.samples_path,
                          "Calibration CSV: id,mt_ms or id,ctd_cm,mt_ms")
        ->required();
    calibrate
        ->add_option("--model", config.model_kind,
                     "Model to fit: distal_pointing, gaze, or hand")
        ->required();
    calibrate->add_option("--out", config.out_path,
                          "Output parameter file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    config.subcommand = app.get_subcommands().front()->get_name();
    return klm3d::run_command(config);
}
