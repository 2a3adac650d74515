#include "klm3d/scenario.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>
#include <set>

#include "klm3d/rng.hpp"

namespace klm3d {

namespace {
constexpr double kInchToMeter = 0.0254;
}

std::string to_string(TaskKind kind) {
    return kind == TaskKind::menu_selection ? "menu_selection" : "manipulation";
}

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "menu_selection") return TaskKind::menu_selection;
    if (s == "manipulation") return TaskKind::manipulation;
    throw SchemaError("unknown task kind '" + s + "'");
}

std::string to_string(ModalityName name) {
    switch (name) {
        case ModalityName::Controller: return "Controller";
        case ModalityName::ControllerBlink: return "ControllerBlink";
        case ModalityName::GazeController: return "GazeController";
        case ModalityName::GazeAirtap: return "GazeAirtap";
        case ModalityName::GazeDwell: return "GazeDwell";
        case ModalityName::Hand: return "Hand";
    }
    throw SchemaError("unknown modality");
}

ModalityName modality_from_string(const std::string& s) {
    if (s == "Controller") return ModalityName::Controller;
    if (s == "ControllerBlink") return ModalityName::ControllerBlink;
    if (s == "GazeController") return ModalityName::GazeController;
    if (s == "GazeAirtap") return ModalityName::GazeAirtap;
    if (s == "GazeDwell") return ModalityName::GazeDwell;
    if (s == "Hand") return ModalityName::Hand;
    throw SchemaError("unknown modality '" + s + "'");
}

std::vector<ModalityName> modalities_for(TaskKind kind) {
    std::vector<ModalityName> out{ModalityName::Controller, ModalityName::ControllerBlink,
                                  ModalityName::GazeController, ModalityName::GazeAirtap};
    if (kind == TaskKind::menu_selection) out.push_back(ModalityName::GazeDwell);
    out.push_back(ModalityName::Hand);
    return out;
}

OperatorParams OperatorParams::defaults() {
    OperatorParams p;
    for (ConfirmationName name :
         {ConfirmationName::none, ConfirmationName::trigger, ConfirmationName::airtap,
          ConfirmationName::pinch_release, ConfirmationName::blink, ConfirmationName::dwell})
        p.confirmations_ms[name] = default_confirmation_ms(name);
    return p;
}

ConfirmationOperator OperatorParams::confirmation(ConfirmationName name) const {
    const auto it = confirmations_ms.find(name);
    if (it == confirmations_ms.end())
        throw SchemaError("confirmation duration for '" + to_string(name) +
                          "' is not configured");
    ConfirmationOperator op{name, it->second};
    op.validate();
    return op;
}

void OperatorParams::validate() const {
    for (const auto& [name, duration] : confirmations_ms)
        ConfirmationOperator{name, duration}.validate();
    OperatorModel distal_model = OperatorModel::default_distal_pointing();
    distal_model.params = distal;
    if (confirmations_ms.count(ConfirmationName::trigger))
        distal_model.embedded_confirmation = confirmation(ConfirmationName::trigger);
    distal_model.validate();
    OperatorModel gaze_model = OperatorModel::default_gaze();
    gaze_model.params = gaze;
    gaze_model.validate();
    OperatorModel hand_model = OperatorModel::default_hand();
    hand_model.params = hand;
    hand_model.validate();
}

Modality make_modality(ModalityName name, TaskKind task, const OperatorParams& params) {
    if (name == ModalityName::GazeDwell && task == TaskKind::manipulation)
        throw InvalidLayout("GazeDwell is not available for manipulation scenarios");
    Modality m;
    m.name = name;
    switch (name) {
        case ModalityName::Controller:
        case ModalityName::ControllerBlink:
            m.mt_model.kind = ModelKind::distal_pointing;
            m.mt_model.params = params.distal;
            m.mt_model.embedded_confirmation = params.confirmation(ConfirmationName::trigger);
            m.confirmation = params.confirmation(name == ModalityName::Controller
                                                     ? ConfirmationName::trigger
                                                     : ConfirmationName::blink);
            break;
        case ModalityName::GazeController:
        case ModalityName::GazeAirtap:
        case ModalityName::GazeDwell: {
            m.mt_model.kind = ModelKind::gaze;
            m.mt_model.params = params.gaze;
            ConfirmationName applied = ConfirmationName::trigger;
            if (name == ModalityName::GazeAirtap) applied = ConfirmationName::airtap;
            if (name == ModalityName::GazeDwell) applied = ConfirmationName::dwell;
            m.confirmation = params.confirmation(applied);
            break;
        }
        case ModalityName::Hand:
            m.mt_model.kind = ModelKind::hand;
            m.mt_model.params = params.hand;
            m.confirmation = params.confirmation(task == TaskKind::manipulation
                                                     ? ConfirmationName::pinch_release
                                                     : ConfirmationName::none);
            break;
    }
    m.mt_model.validate();
    return m;
}

void Scenario::validate() const {
    if (trials.empty()) throw EmptyScenario("scenario has no trials");
    if (modality == ModalityName::GazeDwell && task_kind == TaskKind::manipulation)
        throw InvalidLayout("GazeDwell is not available for manipulation scenarios");
    std::set<int> ids;
    for (const auto& trial : trials) {
        if (!ids.insert(trial.id).second)
            throw InvalidLayout("duplicate trial id " + std::to_string(trial.id));
        const std::size_t n = trial.phases.size();
        if (task_kind == TaskKind::menu_selection && n != 1 && n != 2)
            throw InvalidLayout("menu trials must have 1 or 2 phases");
        if (task_kind == TaskKind::manipulation && n != 3)
            throw InvalidLayout("manipulation trials must have exactly 3 phases");
        for (const auto& phase : trial.phases) phase.movement.validate();
    }
}

void MenuLayout::validate() const {
    if (!(viewer_distance_m > 0.0)) throw InvalidLayout("viewer distance must be > 0");
    if (!(menu_width_in > 0.0) || !(menu_height_in > 0.0))
        throw InvalidLayout("menu dimensions must be > 0");
    if (!(button_size_in > 0.0)) throw InvalidLayout("button size must be > 0");
    if (!(button_pitch_in > 0.0)) throw InvalidLayout("button pitch must be > 0");
    if (next_button_gap_in < 0.0) throw InvalidLayout("next button gap must be >= 0");
}

void ManipulationLayout::validate() const {
    if (!(min_distance_m > 0.0) || !(max_distance_m >= min_distance_m))
        throw InvalidLayout("distance range must satisfy 0 < min <= max");
    if (!(min_scale > 1.0) || !(max_scale >= min_scale))
        throw InvalidLayout("scale range must satisfy 1 < min <= max");
    if (!(base_height_m > 0.0)) throw InvalidLayout("base height must be > 0");
    if (!(target_diameter_m > 0.0) || !(handle_diameter_m > 0.0) ||
        !(scale_target_extent_m > 0.0))
        throw InvalidLayout("target sizes must be > 0");
    for (const auto& a : start_positions)
        if (!a.finite()) throw InvalidLayout("start positions must be finite");
}

namespace {

TargetGeometry square_button(const Vec3& center, double size_m) {
    TargetGeometry t;
    t.center = center;
    t.extent = size_m;
    t.shape = ShapeTag::rect;
    t.width = size_m;
    t.height = size_m;
    return t;
}

PhaseSpec menu_phase(const Vec3& start, const TargetGeometry& target,
                     ConfirmationName confirmation) {
    PhaseSpec p;
    p.movement.origin = Vec3{0.0, 0.0, 0.0};
    p.movement.start = start;
    p.movement.target = target;
    p.movement.depth_axis = Vec3{0.0, 0.0, 1.0};
    p.confirmation = confirmation;
    return p;
}

} // namespace

Scenario generate_menu_scenario(ModalityName modality, const MenuLayout& layout,
                                const OperatorParams& params) {
    layout.validate();
    const Modality bound = make_modality(modality, TaskKind::menu_selection, params);
    const ConfirmationName confirm = bound.confirmation.name;

    const double d = layout.viewer_distance_m;
    const double size = layout.button_size_in * kInchToMeter;
    const double pitch = layout.button_pitch_in * kInchToMeter;
    const Vec3 home{0.0, 0.0, d};
    const double next_x =
        (layout.menu_width_in / 2.0 + layout.next_button_gap_in) * kInchToMeter;
    const TargetGeometry next_button = square_button(Vec3{next_x, 0.0, d}, size);

    // Both pages use the same 2x4 grid; page 2 is reached via Next.
    const auto button_center = [&](int index_in_page) {
        const int row = index_in_page / 4;
        const int col = index_in_page % 4;
        return Vec3{(static_cast<double>(col) - 1.5) * pitch,
                    (0.5 - static_cast<double>(row)) * pitch, d};
    };

    Scenario s;
    s.task_kind = TaskKind::menu_selection;
    s.modality = modality;
    s.trials.reserve(16);
    for (int k = 1; k <= 16; ++k) {
        TrialSpec trial;
        trial.id = k;
        const TargetGeometry target = square_button(button_center((k - 1) % 8), size);
        if (k <= 8) {
            trial.phases.push_back(menu_phase(home, target, confirm));
        } else {
            trial.phases.push_back(menu_phase(home, next_button, confirm));
            trial.phases.push_back(menu_phase(next_button.center, target, confirm));
        }
        s.trials.push_back(std::move(trial));
    }
    s.validate();
    return s;
}

Scenario generate_manipulation_scenario(ModalityName modality, std::uint64_t seed,
                                        const ManipulationLayout& layout,
                                        const OperatorParams& params) {
    layout.validate();
    const Modality bound = make_modality(modality, TaskKind::manipulation, params);
    const ConfirmationName confirm = bound.confirmation.name;
    const Vec3 depth_axis{0.0, 0.0, 1.0};
    const double h = layout.base_height_m;

    SplitMix64 rng(seed);
    Scenario s;
    s.task_kind = TaskKind::manipulation;
    s.modality = modality;
    s.trials.reserve(64);
    for (const Vec3& table_start : layout.start_positions) {
        const Vec3 start = table_start + Vec3{0.0, h / 2.0, 0.0};
        for (int j = 0; j < 16; ++j) {
            const double dist = rng.uniform(layout.min_distance_m, layout.max_distance_m);
            const double scale = rng.uniform(layout.min_scale, layout.max_scale);
            Vec3 dir{0.0, 0.0, 0.0};
            if (j < 8)
                dir.z = (j % 2 == 0) ? 1.0 : -1.0;
            else
                dir.x = (j % 2 == 0) ? 1.0 : -1.0;
            const Vec3 placed = start + dir * dist;
            const Vec3 handle = placed + Vec3{0.0, h / 2.0, 0.0};
            const Vec3 pulled = handle + Vec3{0.0, (scale - 1.0) * h, 0.0};

            TrialSpec trial;
            trial.phases.resize(3);

            PhaseSpec& placement = trial.phases[0];
            placement.movement.origin = layout.device_origin;
            placement.movement.start = start;
            placement.movement.target.center = placed;
            placement.movement.target.extent = layout.target_diameter_m;
            placement.movement.target.shape = ShapeTag::disk;
            placement.movement.depth_axis = depth_axis;
            placement.confirmation = confirm;

            PhaseSpec& search = trial.phases[1];
            search.movement.origin = layout.device_origin;
            search.movement.start = placed;
            search.movement.target.center = handle;
            search.movement.target.extent = layout.handle_diameter_m;
            search.movement.target.shape = ShapeTag::sphere;
            search.movement.depth_axis = depth_axis;
            search.confirmation = confirm;

            PhaseSpec& scale_pull = trial.phases[2];
            scale_pull.movement.origin = layout.device_origin;
            scale_pull.movement.start = handle;
            scale_pull.movement.target.center = pulled;
            scale_pull.movement.target.extent = layout.scale_target_extent_m;
            scale_pull.movement.target.shape = ShapeTag::sphere;
            scale_pull.movement.depth_axis = depth_axis;
            scale_pull.confirmation = confirm;

            s.trials.push_back(std::move(trial));
        }
    }
    for (std::size_t i = s.trials.size() - 1; i > 0; --i)
        std::swap(s.trials[i], s.trials[rng.below(i + 1)]);
    for (std::size_t i = 0; i < s.trials.size(); ++i)
        s.trials[i].id = static_cast<int>(i) + 1;
    s.validate();
    return s;
}

namespace {

ScenarioPrediction::Trial predict_one(const TrialSpec& trial, const Modality& bound,
                                      const OperatorParams& params) {
    std::vector<Phase> phases;
    phases.reserve(trial.phases.size());
    for (const auto& spec : trial.phases)
        phases.push_back(Phase{spec.movement, &bound.mt_model,
                               params.confirmation(spec.confirmation)});
    const TrialPrediction p = predict_trial(phases);
    return ScenarioPrediction::Trial{trial.id, p.per_phase_ms, p.total_ms};
}

ScenarioPrediction reduce_trials(std::vector<ScenarioPrediction::Trial>&& trials) {
    ScenarioPrediction out;
    out.trials = std::move(trials);
    for (const auto& t : out.trials) out.total_ms += t.total_ms;
    out.mean_ms = out.total_ms / static_cast<double>(out.trials.size());
    return out;
}

} // namespace

ScenarioPrediction predict_scenario(const Scenario& s, const OperatorParams& params) {
    s.validate();
    params.validate();
    const Modality bound = make_modality(s.modality, s.task_kind, params);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s.trials.size());
    std::vector<ScenarioPrediction::Trial> trials(s.trials.size());
    std::vector<std::exception_ptr> failures(s.trials.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            trials[i] = predict_one(s.trials[i], bound, params);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return reduce_trials(std::move(trials));
}

ScenarioPrediction predict_scenario_serial(const Scenario& s, const OperatorParams& params) {
    s.validate();
    params.validate();
    const Modality bound = make_modality(s.modality, s.task_kind, params);
    std::vector<ScenarioPrediction::Trial> trials;
    trials.reserve(s.trials.size());
    for (const auto& trial : s.trials) trials.push_back(predict_one(trial, bound, params));
    return reduce_trials(std::move(trials));
}

} // namespace klm3d
