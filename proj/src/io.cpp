#include "klm3d/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace klm3d {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kScenarioSchema = "klm3d-scenario-v1";
constexpr const char* kParamsSchema = "klm3d-params-v1";
constexpr const char* kPredictionsSchema = "klm3d-predictions-v1";
constexpr const char* kAveragesSchema = "klm3d-averages-v1";
constexpr const char* kReportSchema = "klm3d-report-v1";
constexpr const char* kLogsCsvHeader =
    "participant_id,modality,trial_id,actual_ms,predicted_ms,failed,actual_phase_ms,"
    "predicted_phase_ms";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("JSON parse error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const ojson& member(const ojson& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path, std::string("missing field '") + key + "'");
    return *it;
}

void reject_unknown(const ojson& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known) schema_fail(path, "unknown field '" + item.key() + "'");
    }
}

double as_number(const ojson& v, const std::string& path) {
    if (!v.is_number()) schema_fail(path, "expected a number");
    return v.get<double>();
}

double number_field(const ojson& obj, const char* key, const std::string& path) {
    return as_number(member(obj, key, path), path + "." + key);
}

int int_field(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = member(obj, key, path);
    if (!v.is_number_integer()) schema_fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string string_field(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = member(obj, key, path);
    if (!v.is_string()) schema_fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

bool bool_field(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = member(obj, key, path);
    if (!v.is_boolean()) schema_fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

void check_schema(const ojson& obj, const char* expected, const std::string& path) {
    const std::string got = string_field(obj, "schema", path);
    if (got != expected)
        schema_fail(path + ".schema",
                    "expected '" + std::string(expected) + "', got '" + got + "'");
}

ojson vec3_to_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const ojson& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) schema_fail(path, "expected an array of 3 numbers");
    return Vec3{as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
                as_number(v[2], path + "[2]")};
}

std::vector<double> number_array(const ojson& v, const std::string& path) {
    if (!v.is_array()) schema_fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::string shape_to_string(ShapeTag shape) {
    switch (shape) {
        case ShapeTag::sphere: return "sphere";
        case ShapeTag::disk: return "disk";
        case ShapeTag::rect: return "rect";
    }
    throw SchemaError("unknown shape");
}

ShapeTag shape_from_string(const std::string& s, const std::string& path) {
    if (s == "sphere") return ShapeTag::sphere;
    if (s == "disk") return ShapeTag::disk;
    if (s == "rect") return ShapeTag::rect;
    schema_fail(path, "unknown shape '" + s + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        const std::size_t end = text.find(sep, begin);
        if (end == std::string::npos) {
            out.push_back(text.substr(begin));
            return out;
        }
        out.push_back(text.substr(begin, end - begin));
        begin = end + 1;
    }
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines = split(text, '\n');
    for (auto& line : lines)
        if (!line.empty() && line.back() == '\r') line.pop_back();
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

double parse_csv_double(const std::string& field, std::size_t line_no, const char* column) {
    if (field.empty())
        throw ParseError("line " + std::to_string(line_no) + ": empty numeric field '" +
                         column + "'");
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": field '" + column +
                         "' is not a number: '" + field + "'");
    return v;
}

int parse_csv_int(const std::string& field, std::size_t line_no, const char* column) {
    if (field.empty())
        throw ParseError("line " + std::to_string(line_no) + ": empty integer field '" +
                         column + "'");
    char* end = nullptr;
    const long v = std::strtol(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": field '" + column +
                         "' is not an integer: '" + field + "'");
    return static_cast<int>(v);
}

std::string join_phases(const std::vector<double>& phases) {
    std::string out;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (i > 0) out += ';';
        out += fmt_double(phases[i]);
    }
    return out;
}

std::vector<double> parse_phases(const std::string& field, std::size_t line_no,
                                 const char* column) {
    std::vector<double> out;
    if (field.empty()) return out;
    for (const std::string& part : split(field, ';'))
        out.push_back(parse_csv_double(part, line_no, column));
    return out;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw ParseError("cannot read file '" + path + "'");
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error("cannot write file '" + path + "'");
}

namespace {

ojson target_to_json(const TargetGeometry& t) {
    ojson o;
    o["center"] = vec3_to_json(t.center);
    o["extent"] = t.extent;
    o["shape"] = shape_to_string(t.shape);
    if (t.width) o["width"] = *t.width;
    if (t.height) o["height"] = *t.height;
    return o;
}

TargetGeometry target_from_json(const ojson& o, const std::string& path) {
    reject_unknown(o, {"center", "extent", "shape", "width", "height"}, path);
    TargetGeometry t;
    t.center = vec3_from_json(member(o, "center", path), path + ".center");
    t.extent = number_field(o, "extent", path);
    t.shape = shape_from_string(string_field(o, "shape", path), path + ".shape");
    if (o.contains("width")) t.width = as_number(o["width"], path + ".width");
    if (o.contains("height")) t.height = as_number(o["height"], path + ".height");
    return t;
}

ojson phase_to_json(const PhaseSpec& p) {
    ojson o;
    o["origin"] = vec3_to_json(p.movement.origin);
    o["start"] = vec3_to_json(p.movement.start);
    o["target"] = target_to_json(p.movement.target);
    if (p.movement.depth_axis) o["depth_axis"] = vec3_to_json(*p.movement.depth_axis);
    o["confirmation"] = to_string(p.confirmation);
    return o;
}

PhaseSpec phase_from_json(const ojson& o, const std::string& path) {
    reject_unknown(o, {"origin", "start", "target", "depth_axis", "confirmation"}, path);
    PhaseSpec p;
    p.movement.origin = vec3_from_json(member(o, "origin", path), path + ".origin");
    p.movement.start = vec3_from_json(member(o, "start", path), path + ".start");
    p.movement.target = target_from_json(member(o, "target", path), path + ".target");
    if (o.contains("depth_axis"))
        p.movement.depth_axis = vec3_from_json(o["depth_axis"], path + ".depth_axis");
    try {
        p.confirmation = confirmation_from_string(string_field(o, "confirmation", path));
    } catch (const SchemaError& e) {
        schema_fail(path + ".confirmation", e.what());
    }
    return p;
}

} // namespace

std::string scenario_to_json(const Scenario& s) {
    ojson o;
    o["schema"] = kScenarioSchema;
    o["task_kind"] = to_string(s.task_kind);
    o["modality"] = to_string(s.modality);
    o["units"] = ojson{{"length", "m"}, {"time", "ms"}};
    ojson trials = ojson::array();
    for (const auto& trial : s.trials) {
        ojson t;
        t["id"] = trial.id;
        ojson phases = ojson::array();
        for (const auto& phase : trial.phases) phases.push_back(phase_to_json(phase));
        t["phases"] = std::move(phases);
        trials.push_back(std::move(t));
    }
    o["trials"] = std::move(trials);
    return o.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    const ojson o = parse_json(text);
    const std::string path = "scenario";
    reject_unknown(o, {"schema", "task_kind", "modality", "units", "trials"}, path);
    check_schema(o, kScenarioSchema, path);
    Scenario s;
    s.task_kind = task_kind_from_string(string_field(o, "task_kind", path));
    s.modality = modality_from_string(string_field(o, "modality", path));
    const ojson& units = member(o, "units", path);
    reject_unknown(units, {"length", "time"}, path + ".units");
    if (string_field(units, "length", path + ".units") != "m")
        schema_fail(path + ".units.length", "only meters are supported");
    if (string_field(units, "time", path + ".units") != "ms")
        schema_fail(path + ".units.time", "only milliseconds are supported");
    const ojson& trials = member(o, "trials", path);
    if (!trials.is_array()) schema_fail(path + ".trials", "expected an array");
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const std::string tpath = path + ".trials[" + std::to_string(i) + "]";
        reject_unknown(trials[i], {"id", "phases"}, tpath);
        TrialSpec trial;
        trial.id = int_field(trials[i], "id", tpath);
        const ojson& phases = member(trials[i], "phases", tpath);
        if (!phases.is_array()) schema_fail(tpath + ".phases", "expected an array");
        for (std::size_t j = 0; j < phases.size(); ++j)
            trial.phases.push_back(
                phase_from_json(phases[j], tpath + ".phases[" + std::to_string(j) + "]"));
        s.trials.push_back(std::move(trial));
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_json(read_text_file(path));
}

void save_scenario(const Scenario& s, const std::string& path) {
    write_text_file(path, scenario_to_json(s));
}

std::string params_to_json(const OperatorParams& p) {
    ojson o;
    o["schema"] = kParamsSchema;
    ojson models;
    models["distal_pointing"] = ojson{{"a_s", p.distal.a_s},
                                      {"b_s_per_bit", p.distal.b_s_per_bit},
                                      {"embedded_confirmation", "trigger"}};
    ojson gaze;
    gaze["a_ms"] = p.gaze.a_ms ? ojson(*p.gaze.a_ms) : ojson(nullptr);
    gaze["b_ms_per_bit"] = p.gaze.b_ms_per_bit ? ojson(*p.gaze.b_ms_per_bit) : ojson(nullptr);
    gaze["id_crit_bits"] = p.gaze.id_crit_bits;
    gaze["saccade_ms"] = p.gaze.saccade_ms;
    gaze["id_formulation"] = to_string(p.gaze.id_formulation);
    models["gaze"] = std::move(gaze);
    models["hand"] = ojson{{"a_ms", p.hand.a_ms},
                           {"b_ms_per_bit", p.hand.b_ms_per_bit},
                           {"c_ms_per_cm", p.hand.c_ms_per_cm}};
    o["models"] = std::move(models);
    ojson confirmations;
    for (const auto& [name, duration] : p.confirmations_ms)
        confirmations[to_string(name)] = duration;
    o["confirmations_ms"] = std::move(confirmations);
    return o.dump(2) + "\n";
}

namespace {

void overlay_optional_number(const ojson& obj, const char* key, const std::string& path,
                             double& value) {
    if (obj.contains(key)) value = as_number(obj[key], path + "." + key);
}

void overlay_nullable_number(const ojson& obj, const char* key, const std::string& path,
                             std::optional<double>& value) {
    if (!obj.contains(key)) return;
    if (obj[key].is_null())
        value.reset();
    else
        value = as_number(obj[key], path + "." + key);
}

} // namespace

OperatorParams params_from_json(const std::string& text) {
    const ojson o = parse_json(text);
    const std::string path = "params";
    reject_unknown(o, {"schema", "models", "confirmations_ms"}, path);
    check_schema(o, kParamsSchema, path);
    OperatorParams p = OperatorParams::defaults();
    if (o.contains("models")) {
        const ojson& models = o["models"];
        reject_unknown(models, {"distal_pointing", "gaze", "hand"}, path + ".models");
        if (models.contains("distal_pointing")) {
            const ojson& m = models["distal_pointing"];
            const std::string mpath = path + ".models.distal_pointing";
            reject_unknown(m, {"a_s", "b_s_per_bit", "embedded_confirmation"}, mpath);
            overlay_optional_number(m, "a_s", mpath, p.distal.a_s);
            overlay_optional_number(m, "b_s_per_bit", mpath, p.distal.b_s_per_bit);
            if (m.contains("embedded_confirmation") &&
                string_field(m, "embedded_confirmation", mpath) != "trigger")
                schema_fail(mpath + ".embedded_confirmation",
                            "the angular pointing model always embeds a trigger");
        }
        if (models.contains("gaze")) {
            const ojson& m = models["gaze"];
            const std::string mpath = path + ".models.gaze";
            reject_unknown(m, {"a_ms", "b_ms_per_bit", "id_crit_bits", "saccade_ms",
                               "id_formulation"},
                           mpath);
            overlay_nullable_number(m, "a_ms", mpath, p.gaze.a_ms);
            overlay_nullable_number(m, "b_ms_per_bit", mpath, p.gaze.b_ms_per_bit);
            overlay_optional_number(m, "id_crit_bits", mpath, p.gaze.id_crit_bits);
            overlay_optional_number(m, "saccade_ms", mpath, p.gaze.saccade_ms);
            if (m.contains("id_formulation"))
                p.gaze.id_formulation =
                    id_formulation_from_string(string_field(m, "id_formulation", mpath));
        }
        if (models.contains("hand")) {
            const ojson& m = models["hand"];
            const std::string mpath = path + ".models.hand";
            reject_unknown(m, {"a_ms", "b_ms_per_bit", "c_ms_per_cm"}, mpath);
            overlay_optional_number(m, "a_ms", mpath, p.hand.a_ms);
            overlay_optional_number(m, "b_ms_per_bit", mpath, p.hand.b_ms_per_bit);
            overlay_optional_number(m, "c_ms_per_cm", mpath, p.hand.c_ms_per_cm);
        }
    }
    if (o.contains("confirmations_ms")) {
        const ojson& confirmations = o["confirmations_ms"];
        const std::string cpath = path + ".confirmations_ms";
        if (!confirmations.is_object()) schema_fail(cpath, "expected an object");
        for (const auto& item : confirmations.items()) {
            ConfirmationName name = ConfirmationName::none;
            try {
                name = confirmation_from_string(item.key());
            } catch (const SchemaError& e) {
                schema_fail(cpath, e.what());
            }
            p.confirmations_ms[name] = as_number(item.value(), cpath + "." + item.key());
        }
    }
    p.validate();
    return p;
}

OperatorParams load_params(const std::string& path) {
    return params_from_json(read_text_file(path));
}

void save_params(const OperatorParams& p, const std::string& path) {
    write_text_file(path, params_to_json(p));
}

std::string logs_to_csv(const std::vector<TrialRecord>& records) {
    std::string out = std::string(kLogsCsvHeader) + "\n";
    for (const auto& r : records) {
        out += r.participant_id;
        out += ',';
        out += to_string(r.modality);
        out += ',';
        out += std::to_string(r.trial_id);
        out += ',';
        out += fmt_double(r.actual_total_ms);
        out += ',';
        out += fmt_double(r.predicted_total_ms);
        out += ',';
        out += r.failed ? '1' : '0';
        out += ',';
        out += join_phases(r.actual_phase_ms);
        out += ',';
        out += join_phases(r.predicted_phase_ms);
        out += '\n';
    }
    return out;
}

std::vector<TrialRecord> logs_from_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty trial log");
    if (lines[0] != kLogsCsvHeader)
        throw SchemaError("trial-log CSV header must be exactly '" +
                          std::string(kLogsCsvHeader) + "'");
    std::vector<TrialRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        const std::vector<std::string> fields = split(lines[i], ',');
        if (fields.size() != 8)
            throw ParseError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                             std::to_string(fields.size()));
        TrialRecord r;
        r.participant_id = fields[0];
        try {
            r.modality = modality_from_string(fields[1]);
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
        r.trial_id = parse_csv_int(fields[2], line_no, "trial_id");
        r.actual_total_ms = parse_csv_double(fields[3], line_no, "actual_ms");
        // predicted_ms may be left empty when predictions come from a join
        // source at evaluation time.
        r.predicted_total_ms =
            fields[4].empty() ? 0.0 : parse_csv_double(fields[4], line_no, "predicted_ms");
        if (fields[5] == "0" || fields[5] == "false")
            r.failed = false;
        else if (fields[5] == "1" || fields[5] == "true")
            r.failed = true;
        else
            throw ParseError("line " + std::to_string(line_no) +
                             ": field 'failed' must be 0/1/true/false");
        r.actual_phase_ms = parse_phases(fields[6], line_no, "actual_phase_ms");
        r.predicted_phase_ms = parse_phases(fields[7], line_no, "predicted_phase_ms");
        records.push_back(std::move(r));
    }
    return records;
}

std::string logs_to_jsonl(const std::vector<TrialRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        ojson o;
        o["participant_id"] = r.participant_id;
        o["modality"] = to_string(r.modality);
        o["trial_id"] = r.trial_id;
        o["actual_ms"] = r.actual_total_ms;
        o["predicted_ms"] = r.predicted_total_ms;
        o["failed"] = r.failed;
        o["actual_phase_ms"] = r.actual_phase_ms;
        o["predicted_phase_ms"] = r.predicted_phase_ms;
        out += o.dump();
        out += '\n';
    }
    return out;
}

std::vector<TrialRecord> logs_from_jsonl(const std::string& text) {
    std::vector<TrialRecord> records;
    const std::vector<std::string> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string path = "line " + std::to_string(i + 1);
        ojson o;
        try {
            o = ojson::parse(lines[i]);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path + ": JSON parse error at byte " + std::to_string(e.byte) +
                             ": " + e.what());
        }
        reject_unknown(o,
                       {"participant_id", "modality", "trial_id", "actual_ms", "predicted_ms",
                        "failed", "actual_phase_ms", "predicted_phase_ms"},
                       path);
        TrialRecord r;
        r.participant_id = string_field(o, "participant_id", path);
        r.modality = modality_from_string(string_field(o, "modality", path));
        r.trial_id = int_field(o, "trial_id", path);
        r.actual_total_ms = number_field(o, "actual_ms", path);
        r.predicted_total_ms =
            o.contains("predicted_ms") && o["predicted_ms"].is_null()
                ? 0.0
                : number_field(o, "predicted_ms", path);
        r.failed = bool_field(o, "failed", path);
        if (o.contains("actual_phase_ms"))
            r.actual_phase_ms = number_array(o["actual_phase_ms"], path + ".actual_phase_ms");
        if (o.contains("predicted_phase_ms"))
            r.predicted_phase_ms =
                number_array(o["predicted_phase_ms"], path + ".predicted_phase_ms");
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

bool looks_like_jsonl(const std::string& text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        return c == '{';
    }
    return false;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::vector<TrialRecord> load_logs(const std::string& path) {
    const std::string text = read_text_file(path);
    if (has_suffix(path, ".csv")) return logs_from_csv(text);
    if (has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson") || has_suffix(path, ".json"))
        return logs_from_jsonl(text);
    return looks_like_jsonl(text) ? logs_from_jsonl(text) : logs_from_csv(text);
}

void save_logs(const std::vector<TrialRecord>& records, const std::string& path) {
    if (has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson"))
        write_text_file(path, logs_to_jsonl(records));
    else
        write_text_file(path, logs_to_csv(records));
}

std::string predictions_to_json(const std::vector<PredictionSet>& sets) {
    ojson o;
    o["schema"] = kPredictionsSchema;
    ojson list = ojson::array();
    for (const auto& set : sets) {
        ojson s;
        s["task_kind"] = to_string(set.task_kind);
        s["modality"] = to_string(set.modality);
        ojson trials = ojson::array();
        for (const auto& t : set.prediction.trials) {
            ojson trial;
            trial["id"] = t.trial_id;
            trial["per_phase_ms"] = t.per_phase_ms;
            trial["total_ms"] = t.total_ms;
            trials.push_back(std::move(trial));
        }
        s["trials"] = std::move(trials);
        s["total_ms"] = set.prediction.total_ms;
        s["mean_ms"] = set.prediction.mean_ms;
        list.push_back(std::move(s));
    }
    o["predictions"] = std::move(list);
    return o.dump(2) + "\n";
}

std::vector<PredictionSet> predictions_from_json(const std::string& text) {
    const ojson o = parse_json(text);
    const std::string path = "predictions";
    reject_unknown(o, {"schema", "predictions"}, path);
    check_schema(o, kPredictionsSchema, path);
    const ojson& list = member(o, "predictions", path);
    if (!list.is_array()) schema_fail(path + ".predictions", "expected an array");
    std::vector<PredictionSet> sets;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string spath = path + "[" + std::to_string(i) + "]";
        reject_unknown(list[i], {"task_kind", "modality", "trials", "total_ms", "mean_ms"},
                       spath);
        PredictionSet set;
        set.task_kind = task_kind_from_string(string_field(list[i], "task_kind", spath));
        set.modality = modality_from_string(string_field(list[i], "modality", spath));
        const ojson& trials = member(list[i], "trials", spath);
        if (!trials.is_array()) schema_fail(spath + ".trials", "expected an array");
        for (std::size_t j = 0; j < trials.size(); ++j) {
            const std::string tpath = spath + ".trials[" + std::to_string(j) + "]";
            reject_unknown(trials[j], {"id", "per_phase_ms", "total_ms"}, tpath);
            ScenarioPrediction::Trial t;
            t.trial_id = int_field(trials[j], "id", tpath);
            t.per_phase_ms =
                number_array(member(trials[j], "per_phase_ms", tpath), tpath + ".per_phase_ms");
            t.total_ms = number_field(trials[j], "total_ms", tpath);
            set.prediction.trials.push_back(std::move(t));
        }
        set.prediction.total_ms = number_field(list[i], "total_ms", spath);
        set.prediction.mean_ms = number_field(list[i], "mean_ms", spath);
        sets.push_back(std::move(set));
    }
    return sets;
}

std::vector<PredictionSet> load_predictions(const std::string& path) {
    return predictions_from_json(read_text_file(path));
}

std::string predictions_to_csv(const std::vector<PredictionSet>& sets) {
    std::string out = "modality,trial_id,total_ms,per_phase_ms\n";
    for (const auto& set : sets) {
        for (const auto& t : set.prediction.trials) {
            out += to_string(set.modality);
            out += ',';
            out += std::to_string(t.trial_id);
            out += ',';
            out += fmt_double(t.total_ms);
            out += ',';
            out += join_phases(t.per_phase_ms);
            out += '\n';
        }
    }
    return out;
}

CompareAverages averages_from_json(const std::string& text) {
    const ojson o = parse_json(text);
    const std::string path = "averages";
    reject_unknown(o, {"schema", "averages"}, path);
    check_schema(o, kAveragesSchema, path);
    const ojson& list = member(o, "averages", path);
    if (!list.is_object()) schema_fail(path + ".averages", "expected an object");
    CompareAverages out;
    for (const auto& item : list.items()) {
        const std::string mpath = path + ".averages." + item.key();
        ModalityName modality = ModalityName::Controller;
        try {
            modality = modality_from_string(item.key());
        } catch (const SchemaError& e) {
            schema_fail(path + ".averages", e.what());
        }
        reject_unknown(item.value(), {"predicted", "actual"}, mpath);
        out.predicted[modality] = number_field(item.value(), "predicted", mpath);
        out.actual[modality] = number_field(item.value(), "actual", mpath);
    }
    return out;
}

CompareAverages load_averages(const std::string& path) {
    return averages_from_json(read_text_file(path));
}

std::string report_to_json(const EvalReport& report, const ReportMeta& meta) {
    ojson o;
    o["schema"] = kReportSchema;
    ojson config;
    config["pct_form"] = to_string(report.options.pct_form);
    config["tost_reference"] = to_string(report.options.tost_reference);
    config["bound"] = report.options.bound;
    config["outlier_sd"] = report.options.outlier_sd;
    config["gate"] = meta.gate;
    config["stamp"] = meta.stamp ? ojson(*meta.stamp) : ojson(nullptr);
    o["config"] = std::move(config);
    ojson modalities = ojson::array();
    for (const auto& m : report.modalities) {
        ojson e;
        e["modality"] = to_string(m.modality);
        e["n_kept"] = m.n_kept;
        e["n_failed"] = m.n_failed;
        e["n_outliers"] = m.n_outliers;
        e["total_actual_ms"] = m.total_actual_ms;
        e["total_predicted_ms"] = m.total_predicted_ms;
        e["mean_actual_ms"] = m.mean_actual_ms;
        e["mean_predicted_ms"] = m.mean_predicted_ms;
        e["percent_difference"] = m.percent_difference;
        if (m.z_test) {
            ojson z;
            z["z"] = m.z_test->z;
            z["p"] = m.z_test->p;
            z["sd"] = m.z_test->sd;
            z["d"] = m.z_test->d;
            z["effect_band"] = to_string(*m.band);
            e["z_test"] = std::move(z);
        } else {
            e["z_test"] = nullptr;
        }
        ojson tost;
        tost["t"] = m.tost.t;
        tost["p"] = m.tost.p;
        tost["sd"] = m.tost.sd;
        tost["ci_low"] = m.tost.ci_low;
        tost["ci_high"] = m.tost.ci_high;
        tost["equivalent"] = m.tost.equivalent;
        e["tost"] = std::move(tost);
        e["predicted_rank"] = m.predicted_rank;
        e["actual_rank"] = m.actual_rank;
        modalities.push_back(std::move(e));
    }
    o["modalities"] = std::move(modalities);
    o["mean_rank_diff"] = report.mean_rank_diff;
    ojson pairwise;
    pairwise["n_correct"] = report.pairwise.n_correct;
    pairwise["n_total"] = report.pairwise.n_total;
    pairwise["rate"] = report.pairwise.rate;
    o["pairwise"] = std::move(pairwise);
    return o.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
    std::string out =
        "modality,n_kept,n_failed,n_outliers,percent_difference,z,p_z,sd_delta,cohens_d,"
        "effect_band,t_tost,p_tost,sd_pct,ci_low,ci_high,equivalent\n";
    for (const auto& m : report.modalities) {
        out += to_string(m.modality);
        out += ',';
        out += std::to_string(m.n_kept);
        out += ',';
        out += std::to_string(m.n_failed);
        out += ',';
        out += std::to_string(m.n_outliers);
        out += ',';
        out += fmt_double(m.percent_difference);
        out += ',';
        if (m.z_test) {
            out += fmt_double(m.z_test->z);
            out += ',';
            out += fmt_double(m.z_test->p);
            out += ',';
            out += fmt_double(m.z_test->sd);
            out += ',';
            out += fmt_double(m.z_test->d);
            out += ',';
            out += to_string(*m.band);
        } else {
            out += ",,,,";
        }
        out += ',';
        out += fmt_double(m.tost.t);
        out += ',';
        out += fmt_double(m.tost.p);
        out += ',';
        out += fmt_double(m.tost.sd);
        out += ',';
        out += fmt_double(m.tost.ci_low);
        out += ',';
        out += fmt_double(m.tost.ci_high);
        out += ',';
        out += m.tost.equivalent ? "true" : "false";
        out += '\n';
    }
    return out;
}

CalibrationData samples_from_csv(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty calibration file");
    CalibrationData data;
    if (lines[0] == "id,ctd_cm,mt_ms")
        data.has_ctd = true;
    else if (lines[0] != "id,mt_ms")
        throw SchemaError("calibration CSV header must be 'id,mt_ms' or 'id,ctd_cm,mt_ms'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        const std::vector<std::string> fields = split(lines[i], ',');
        const std::size_t expected = data.has_ctd ? 3 : 2;
        if (fields.size() != expected)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(expected) + " fields, got " +
                             std::to_string(fields.size()));
        CalibrationSample s;
        s.id = parse_csv_double(fields[0], line_no, "id");
        if (data.has_ctd) {
            s.ctd_cm = parse_csv_double(fields[1], line_no, "ctd_cm");
            s.mt_ms = parse_csv_double(fields[2], line_no, "mt_ms");
        } else {
            s.mt_ms = parse_csv_double(fields[1], line_no, "mt_ms");
        }
        data.samples.push_back(s);
    }
    if (data.samples.empty()) throw InsufficientData("calibration file has no samples");
    return data;
}

CalibrationData load_samples(const std::string& path) {
    return samples_from_csv(read_text_file(path));
}

} // namespace klm3d
