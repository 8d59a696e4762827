#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwcc/baselines.hpp"
#include "uwcc/chart.hpp"
#include "uwcc/errors.hpp"
#include "uwcc/estimation.hpp"
#include "uwcc/formation.hpp"
#include "uwcc/image.hpp"
#include "uwcc/io/image_io.hpp"
#include "uwcc/metrics.hpp"
#include "uwcc/sparse.hpp"

namespace uwcc {

enum class CoeffSource { manual, estimate_from_chart, optimize, water_derived };
enum class VeilingSource { spectral, background, manual };

/// Scene parameters as they appear in a job file, before any tables load.
struct JobScene {
    std::string water_type = "IA";
    std::string data_dir = "data";
    std::string camera_response;  // empty -> bundled default response
    double depth_m = 1.0;
    std::optional<double> exposure_k;  // empty -> auto exposure
    double surface_light_e0 = 1.0;
    double reflectance_rho = 1.0;
    AmbientModel ambient_model = AmbientModel::exponential;
};

/// One unit of CLI work. A single schema serves simulate / estimate / correct /
/// correct-sparse; each runner checks the fields it needs.
struct FrameJob {
    std::string image;
    bool assume_linear = false;
    JobScene scene;

    // range: exactly one of the two
    std::optional<double> range_scalar;
    std::string sparse_map;  // CSV path
    double sparse_scale = 1.0;
    int patch_px = 64;

    CoeffSource coeff_source = CoeffSource::manual;
    std::string coeffs_path;  // manual source only

    VeilingSource veiling_source = VeilingSource::spectral;
    double background_percentile = 0.1;
    Rgb manual_veiling{0.0, 0.0, 0.0};

    std::string chart_layout;  // required for chart-based coefficients
    std::optional<double> chart_range_m;
    double trim = 0.1;

    std::string output;
    std::string sidecar;
    std::string coeffs_out;  // estimate subcommand

    void validate() const {
        if (image.empty()) throw validation_error("job needs an 'image' path");
        bool has_scalar = range_scalar.has_value();
        bool has_sparse = !sparse_map.empty();
        if (has_scalar == has_sparse)
            throw validation_error("job range must be exactly one of scalar / sparse_map");
        if (has_scalar && !(*range_scalar > 0.0))
            throw validation_error("job scalar range must be positive");
        if (!(sparse_scale > 0.0)) throw validation_error("sparse scale must be positive");
        if (patch_px <= 0) throw validation_error("patch size must be positive");
        if (coeff_source == CoeffSource::manual && coeffs_path.empty())
            throw validation_error("manual coefficient source needs a JSON path");
        if ((coeff_source == CoeffSource::estimate_from_chart ||
             coeff_source == CoeffSource::optimize) &&
            chart_layout.empty())
            throw validation_error("chart-based coefficient source needs a chart layout");
        if (veiling_source == VeilingSource::manual)
            for (double v : manual_veiling)
                if (!(v >= 0.0) || v > 1.0)
                    throw validation_error("manual veiling values must be in [0,1]");
        if (!(background_percentile > 0.0) || background_percentile > 1.0)
            throw validation_error("background percentile must be in (0,1]");
        if (!(trim >= 0.0) || trim > 0.4) throw validation_error("trim must be in [0,0.4]");
        if (chart_range_m && !(*chart_range_m > 0.0))
            throw validation_error("chart range must be positive");
    }
};

// ---- job JSON ---------------------------------------------------------------

namespace detail {
inline double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw validation_error(std::string("job field '") + key + "' must be a number");
    return j[key].get<double>();
}
inline std::string require_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw validation_error(std::string("job field '") + key + "' must be a string");
    return j[key].get<std::string>();
}
inline std::string optional_string(const nlohmann::json& j, const char* key,
                                   const std::string& fallback = "") {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw validation_error(std::string("job field '") + key + "' must be a string");
    return j[key].get<std::string>();
}
inline double optional_number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw validation_error(std::string("job field '") + key + "' must be a number");
    return j[key].get<double>();
}

/// Exactly one of `keys` must be present in the object `j` (named `what`).
inline std::string exactly_one_of(const nlohmann::json& j, const char* what,
                                  std::initializer_list<const char*> keys) {
    std::string found;
    int count = 0;
    for (const char* k : keys)
        if (j.contains(k)) {
            ++count;
            found = k;
        }
    if (count != 1) {
        std::string opts;
        for (const char* k : keys) opts += (opts.empty() ? "" : " / ") + std::string(k);
        throw validation_error(std::string(what) + " must specify exactly one of: " + opts);
    }
    return found;
}
}  // namespace detail

inline JobScene job_scene_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("job 'scene' must be an object");
    JobScene s;
    s.water_type = detail::optional_string(j, "water_type", s.water_type);
    s.data_dir = detail::optional_string(j, "data_dir", s.data_dir);
    s.camera_response = detail::optional_string(j, "camera_response", "");
    s.depth_m = detail::require_number(j, "depth_m");
    if (j.contains("exposure_k")) s.exposure_k = detail::require_number(j, "exposure_k");
    s.surface_light_e0 = detail::optional_number(j, "surface_light_e0", 1.0);
    s.reflectance_rho = detail::optional_number(j, "reflectance_rho", 1.0);
    s.ambient_model =
        ambient_model_from_string(detail::optional_string(j, "ambient_model", "exponential"));
    return s;
}

inline FrameJob job_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("job must be a JSON object");
    FrameJob job;
    job.image = detail::require_string(j, "image");
    if (j.contains("assume_linear")) {
        if (!j["assume_linear"].is_boolean())
            throw validation_error("job 'assume_linear' must be a boolean");
        job.assume_linear = j["assume_linear"].get<bool>();
    }
    if (!j.contains("scene")) throw validation_error("job needs a 'scene' object");
    job.scene = job_scene_from_json(j["scene"]);

    if (!j.contains("range") || !j["range"].is_object())
        throw validation_error("job needs a 'range' object");
    const auto& rng = j["range"];
    std::string rkey = detail::exactly_one_of(rng, "job range", {"scalar", "sparse_map"});
    if (rkey == "scalar") {
        job.range_scalar = detail::require_number(rng, "scalar");
    } else {
        job.sparse_map = detail::require_string(rng, "sparse_map");
        job.sparse_scale = detail::optional_number(rng, "scale", 1.0);
        double px = detail::optional_number(rng, "patch_px", 64.0);
        if (px != std::floor(px)) throw validation_error("patch_px must be an integer");
        job.patch_px = static_cast<int>(px);
    }

    if (!j.contains("coefficients") || !j["coefficients"].is_object())
        throw validation_error("job needs a 'coefficients' object");
    const auto& co = j["coefficients"];
    std::string ckey = detail::exactly_one_of(
        co, "job coefficients", {"manual", "estimate_from_chart", "optimize", "water_derived"});
    if (ckey == "manual") {
        job.coeff_source = CoeffSource::manual;
        job.coeffs_path = detail::require_string(co, "manual");
    } else if (ckey == "estimate_from_chart") {
        job.coeff_source = CoeffSource::estimate_from_chart;
    } else if (ckey == "optimize") {
        job.coeff_source = CoeffSource::optimize;
    } else {
        job.coeff_source = CoeffSource::water_derived;
    }

    if (!j.contains("veiling") || !j["veiling"].is_object())
        throw validation_error("job needs a 'veiling' object");
    const auto& ve = j["veiling"];
    std::string vkey =
        detail::exactly_one_of(ve, "job veiling", {"spectral", "background", "manual"});
    if (vkey == "spectral") {
        job.veiling_source = VeilingSource::spectral;
    } else if (vkey == "background") {
        job.veiling_source = VeilingSource::background;
        if (ve["background"].is_object())
            job.background_percentile =
                detail::optional_number(ve["background"], "percentile", 0.1);
    } else {
        job.veiling_source = VeilingSource::manual;
        const auto& m = ve["manual"];
        if (!m.is_array() || m.size() != 3)
            throw validation_error("manual veiling must be a 3-element array");
        for (std::size_t c = 0; c < 3; ++c) {
            if (!m[c].is_number()) throw validation_error("manual veiling entries must be numbers");
            job.manual_veiling[c] = m[c].get<double>();
        }
    }

    if (j.contains("chart")) {
        const auto& ch = j["chart"];
        if (!ch.is_object()) throw validation_error("job 'chart' must be an object");
        job.chart_layout = detail::optional_string(ch, "layout", "");
        if (ch.contains("range_m")) job.chart_range_m = detail::require_number(ch, "range_m");
        job.trim = detail::optional_number(ch, "trim", 0.1);
    }

    job.output = detail::optional_string(j, "output", "");
    job.sidecar = detail::optional_string(j, "sidecar", "");
    job.coeffs_out = detail::optional_string(j, "coeffs_out", "");
    job.validate();
    return job;
}

inline FrameJob load_job(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open job file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("job file " + path + " is not valid JSON: " + e.what());
    }
    return job_from_json(j);
}

// ---- resolution -------------------------------------------------------------

/// Load water tables and sensor response for a job scene.
inline SceneContext make_scene(const JobScene& s) {
    SceneContext ctx;
    ctx.water = load_water_type(s.water_type, s.data_dir);
    ctx.camera = s.camera_response.empty() ? default_camera_response()
                                           : load_camera_response(s.camera_response);
    ctx.depth_m = s.depth_m;
    ctx.exposure_k = s.exposure_k;
    ctx.surface_light_e0 = s.surface_light_e0;
    ctx.reflectance_rho = s.reflectance_rho;
    ctx.ambient_model = s.ambient_model;
    ctx.validate();
    return ctx;
}

/// Everything the sidecar records: the fully resolved model terms for a frame.
struct ResolvedFrame {
    SceneContext ctx;
    double exposure_k = 1.0;
    VeilingLight b_inf;
    AttenuationCoeffs coeffs;
    double range_m = 0.0;  // scalar range for dense ops (chart range for estimate)
};

/// Resolve veiling, exposure and coefficients for an already-decoded frame.
/// This is the in-memory core of `correct`/`estimate`: the CLI wraps it with
/// file decode/encode.
inline ResolvedFrame resolve_frame(const FrameJob& job, const LinearImage& img) {
    job.validate();
    ResolvedFrame rf;
    rf.ctx = make_scene(job.scene);
    rf.exposure_k = resolve_exposure(rf.ctx);
    rf.ctx.exposure_k = rf.exposure_k;  // pin so later veiling_light calls agree

    switch (job.veiling_source) {
        case VeilingSource::spectral: rf.b_inf = veiling_light(rf.ctx); break;
        case VeilingSource::background:
            rf.b_inf = background_veiling_estimate(img, job.background_percentile);
            break;
        case VeilingSource::manual: rf.b_inf.rgb = job.manual_veiling; break;
    }

    rf.range_m = job.range_scalar ? *job.range_scalar : 0.0;
    const double chart_z = job.chart_range_m ? *job.chart_range_m
                          : job.range_scalar ? *job.range_scalar
                                             : 0.0;

    switch (job.coeff_source) {
        case CoeffSource::manual: rf.coeffs = load_coeffs(job.coeffs_path); break;
        case CoeffSource::water_derived: {
            if (!(chart_z > 0.0))
                throw validation_error("water-derived coefficients need a scalar or chart range");
            rf.coeffs = derive_water_coeffs(rf.ctx, chart_z);
            break;
        }
        case CoeffSource::estimate_from_chart:
        case CoeffSource::optimize: {
            if (!(chart_z > 0.0))
                throw validation_error("chart estimation needs a scalar or chart range");
            ChartLayout layout = load_chart_layout(job.chart_layout);
            ChartObservation obs = observe_chart(img, layout, chart_z, job.trim);
            rf.coeffs = estimate_closed_form(obs, rf.b_inf);
            if (job.coeff_source == CoeffSource::optimize)
                rf.coeffs = refine_least_squares(obs, rf.b_inf, rf.coeffs);
            break;
        }
    }
    rf.coeffs.validate();
    return rf;
}

/// Dense correction of a resolved frame (scalar range).
inline LinearImage correct_resolved(const LinearImage& img, const ResolvedFrame& rf) {
    if (!(rf.range_m > 0.0)) throw validation_error("dense correction needs a scalar range");
    return invert(img, rf.coeffs, rf.b_inf, RangeField::uniform(rf.range_m));
}

inline nlohmann::ordered_json frame_sidecar(const FrameJob& job, const ResolvedFrame& rf) {
    nlohmann::ordered_json j;
    j["image"] = job.image;
    if (!job.output.empty()) j["output"] = job.output;
    j["water_type"] = rf.ctx.water.type_name;
    j["ambient_model"] = to_string(rf.ctx.ambient_model);
    j["depth_m"] = rf.ctx.depth_m;
    if (job.range_scalar) j["range_m"] = *job.range_scalar;
    if (!job.sparse_map.empty()) {
        j["sparse_map"] = job.sparse_map;
        j["sparse_scale"] = job.sparse_scale;
        j["patch_px"] = job.patch_px;
    }
    j["exposure_k"] = rf.exposure_k;
    j["surface_light_e0"] = rf.ctx.surface_light_e0;
    j["reflectance_rho"] = rf.ctx.reflectance_rho;
    j["b_inf"] = {rf.b_inf.rgb[0], rf.b_inf.rgb[1], rf.b_inf.rgb[2]};
    j["beta_d"] = {rf.coeffs.beta_d[0], rf.coeffs.beta_d[1], rf.coeffs.beta_d[2]};
    j["beta_b"] = {rf.coeffs.beta_b[0], rf.coeffs.beta_b[1], rf.coeffs.beta_b[2]};
    j["provenance"] = to_string(rf.coeffs.provenance);
    j["eps_direct"] = kEpsilonDirect;
    return j;
}

namespace detail {
inline void write_json_file(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw validation_error("cannot write: " + path);
    f << j.dump(2) << "\n";
}
}  // namespace detail

// ---- runners ----------------------------------------------------------------

/// simulate: clean frame -> degraded frame + ground-truth sidecar.
inline void run_simulate(const FrameJob& job) {
    job.validate();
    if (job.output.empty()) throw validation_error("simulate needs an 'output' path");
    if (job.coeff_source == CoeffSource::estimate_from_chart ||
        job.coeff_source == CoeffSource::optimize)
        throw validation_error("simulate takes manual or water-derived coefficients");
    if (!job.range_scalar) throw validation_error("simulate needs a scalar range");

    LinearImage img = io::read_linear(job.image, job.assume_linear);
    ResolvedFrame rf = resolve_frame(job, img);
    LinearImage degraded = forward_degrade(img, rf.coeffs, rf.b_inf,
                                           RangeField::uniform(rf.range_m),
                                           rf.ctx.reflectance_rho);
    io::write_linear(degraded, job.output, job.assume_linear);
    if (!job.sidecar.empty()) detail::write_json_file(frame_sidecar(job, rf), job.sidecar);
}

/// estimate: chart frame -> coefficient JSON (and optional sidecar).
inline void run_estimate(const FrameJob& job) {
    job.validate();
    if (job.coeff_source != CoeffSource::estimate_from_chart &&
        job.coeff_source != CoeffSource::optimize)
        throw validation_error("estimate needs a chart-based coefficient source");
    if (job.coeffs_out.empty()) throw validation_error("estimate needs a 'coeffs_out' path");

    LinearImage img = io::read_linear(job.image, job.assume_linear);
    ResolvedFrame rf = resolve_frame(job, img);
    save_coeffs(rf.coeffs, job.coeffs_out);
    if (!job.sidecar.empty()) detail::write_json_file(frame_sidecar(job, rf), job.sidecar);
}

/// correct: frame -> dense-corrected frame + sidecar.
inline void run_correct(const FrameJob& job) {
    job.validate();
    if (job.output.empty()) throw validation_error("correct needs an 'output' path");
    if (job.coeff_source == CoeffSource::water_derived)
        throw validation_error("correct takes manual, estimated, or optimized coefficients");
    if (!job.range_scalar)
        throw validation_error("correct needs a scalar range (use correct-sparse for maps)");

    LinearImage img = io::read_linear(job.image, job.assume_linear);
    ResolvedFrame rf = resolve_frame(job, img);
    LinearImage corrected = correct_resolved(img, rf);
    io::write_linear(corrected, job.output, job.assume_linear);
    if (!job.sidecar.empty()) detail::write_json_file(frame_sidecar(job, rf), job.sidecar);
}

/// correct-sparse: frame + keypoint ranges -> patchwise-corrected frame + sidecar.
inline void run_correct_sparse(const FrameJob& job) {
    job.validate();
    if (job.output.empty()) throw validation_error("correct-sparse needs an 'output' path");
    if (job.sparse_map.empty()) throw validation_error("correct-sparse needs a sparse_map range");
    if (job.coeff_source == CoeffSource::water_derived)
        throw validation_error("correct-sparse takes manual, estimated, or optimized coefficients");

    LinearImage img = io::read_linear(job.image, job.assume_linear);
    ResolvedFrame rf = resolve_frame(job, img);
    SparseRangeMap map = ingest_sparse_map(job.sparse_map, job.sparse_scale);
    LinearImage corrected = correct_sparse(img, map, rf.coeffs, rf.b_inf, job.patch_px);
    io::write_linear(corrected, job.output, job.assume_linear);
    if (!job.sidecar.empty()) {
        auto j = frame_sidecar(job, rf);
        j["keypoints"] = map.points.size();
        detail::write_json_file(j, job.sidecar);
    }
}

// ---- evaluate ---------------------------------------------------------------

/// One depth step of an evaluation series: a label plus one image per method.
struct EvalFrame {
    std::string label;
    std::map<std::string, std::string> images;  // method label -> path
    std::string layout_path;                    // empty -> manifest default
};

/// Manifest for the evaluation harness: which frames, which methods, where the
/// chart sits, and which CSVs to produce.
struct EvaluateManifest {
    std::vector<std::string> methods;
    std::vector<EvalFrame> frames;
    std::string layout_path;      // default layout
    std::string accuracy_frame;   // label; empty -> last frame
    std::string accuracy_csv;     // empty -> skip
    std::string consistency_csv;  // empty -> skip
    double trim = 0.1;
    bool assume_linear = false;

    void validate() const {
        if (methods.empty()) throw validation_error("evaluate needs at least one method");
        if (frames.empty()) throw validation_error("evaluate needs at least one frame");
        std::set<std::string> seen;
        for (const auto& m : methods)
            if (!seen.insert(m).second)
                throw validation_error("duplicate method label '" + m + "'");
        for (const auto& f : frames) {
            if (f.label.empty()) throw validation_error("evaluate frame with empty label");
            if (f.layout_path.empty() && layout_path.empty())
                throw validation_error("frame '" + f.label + "' has no chart layout");
            for (const auto& m : methods)
                if (!f.images.count(m))
                    throw validation_error("frame '" + f.label + "' missing image for method '" +
                                           m + "'");
        }
        if (accuracy_csv.empty() && consistency_csv.empty())
            throw validation_error("evaluate needs at least one output CSV");
        if (!accuracy_frame.empty()) {
            bool found = false;
            for (const auto& f : frames) found = found || f.label == accuracy_frame;
            if (!found)
                throw validation_error("accuracy_frame '" + accuracy_frame +
                                       "' is not a frame label");
        }
        if (!(trim >= 0.0) || trim > 0.4) throw validation_error("trim must be in [0,0.4]");
    }
};

inline EvaluateManifest manifest_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("evaluate manifest must be a JSON object");
    EvaluateManifest m;
    if (!j.contains("methods") || !j["methods"].is_array())
        throw validation_error("manifest needs a 'methods' array");
    for (const auto& e : j["methods"]) {
        if (!e.is_string()) throw validation_error("method labels must be strings");
        m.methods.push_back(e.get<std::string>());
    }
    if (!j.contains("frames") || !j["frames"].is_array())
        throw validation_error("manifest needs a 'frames' array");
    for (const auto& e : j["frames"]) {
        if (!e.is_object()) throw validation_error("manifest frames must be objects");
        EvalFrame f;
        f.label = detail::require_string(e, "label");
        if (!e.contains("images") || !e["images"].is_object())
            throw validation_error("frame '" + f.label + "' needs an 'images' object");
        for (const auto& [k, v] : e["images"].items()) {
            if (!v.is_string()) throw validation_error("image paths must be strings");
            f.images[k] = v.get<std::string>();
        }
        f.layout_path = detail::optional_string(e, "layout", "");
        m.frames.push_back(std::move(f));
    }
    m.layout_path = detail::optional_string(j, "layout", "");
    m.accuracy_frame = detail::optional_string(j, "accuracy_frame", "");
    m.accuracy_csv = detail::optional_string(j, "accuracy_csv", "");
    m.consistency_csv = detail::optional_string(j, "consistency_csv", "");
    m.trim = detail::optional_number(j, "trim", 0.1);
    if (j.contains("assume_linear")) {
        if (!j["assume_linear"].is_boolean())
            throw validation_error("manifest 'assume_linear' must be a boolean");
        m.assume_linear = j["assume_linear"].get<bool>();
    }
    m.validate();
    return m;
}

inline EvaluateManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open evaluate manifest: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("manifest " + path + " is not valid JSON: " + e.what());
    }
    return manifest_from_json(j);
}

namespace detail {
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}
}  // namespace detail

/// Run the evaluation harness. The per-patch accuracy table (normalized
/// color distance at one frame) is written first; the cross-depth
/// consistency table requires at least two frames and errors otherwise,
/// after the accuracy CSV is already on disk.
inline void run_evaluate(const EvaluateManifest& m) {
    m.validate();

    // Sample every frame once per method.
    // patch order: bundled chart order filtered to the first layout's names.
    std::vector<ChartLayout> layouts(m.frames.size());
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
        const std::string& lp =
            m.frames[i].layout_path.empty() ? m.layout_path : m.frames[i].layout_path;
        layouts[i] = load_chart_layout(lp);
    }
    std::vector<std::string> patch_names;
    for (const auto& p : chart_patches())
        if (layouts[0].find(p.name)) patch_names.push_back(p.name);
    if (patch_names.empty())
        throw validation_error("layout has no patches matching the bundled chart");
    for (std::size_t i = 1; i < layouts.size(); ++i)
        for (const auto& name : patch_names)
            if (!layouts[i].find(name))
                throw validation_error("frame '" + m.frames[i].label + "' layout missing patch '" +
                                       name + "'");

    // samples[method][frame][patch]
    std::map<std::string, std::vector<std::map<std::string, Rgb>>> samples;
    for (const auto& method : m.methods) {
        auto& per_frame = samples[method];
        per_frame.resize(m.frames.size());
        for (std::size_t i = 0; i < m.frames.size(); ++i) {
            LinearImage img =
                io::read_linear(m.frames[i].images.at(method), m.assume_linear);
            for (const auto& name : patch_names)
                per_frame[i][name] = sample_patch(img, *layouts[i].find(name), m.trim);
        }
    }

    std::size_t acc_idx = m.frames.size() - 1;
    if (!m.accuracy_frame.empty())
        for (std::size_t i = 0; i < m.frames.size(); ++i)
            if (m.frames[i].label == m.accuracy_frame) acc_idx = i;

    if (!m.accuracy_csv.empty()) {
        std::ofstream f(m.accuracy_csv);
        if (!f) throw validation_error("cannot write: " + m.accuracy_csv);
        f << "patch,method,distance\n";
        std::map<std::string, double> sums;
        for (const auto& name : patch_names) {
            Rgb ref = chart_reference_linear(name);
            for (const auto& method : m.methods) {
                double d = normalized_color_distance(samples[method][acc_idx][name], ref);
                sums[method] += d;
                f << name << "," << method << "," << detail::csv_double(d) << "\n";
            }
        }
        for (const auto& method : m.methods)
            f << "average," << method << ","
              << detail::csv_double(sums[method] / static_cast<double>(patch_names.size()))
              << "\n";
    }

    if (!m.consistency_csv.empty()) {
        if (m.frames.size() < 2)
            throw validation_error(
                "consistency needs a series of at least two frames (accuracy was still written)");
        std::ofstream f(m.consistency_csv);
        if (!f) throw validation_error("cannot write: " + m.consistency_csv);
        f << "patch,method,variance,mean_error\n";
        std::map<std::string, std::array<double, 2>> sums;
        for (const auto& name : patch_names) {
            Rgb ref = chart_reference_linear(name);
            for (const auto& method : m.methods) {
                std::vector<Rgb> series;
                for (std::size_t i = 0; i < m.frames.size(); ++i)
                    series.push_back(samples[method][i][name]);
                ConsistencyReport rep = consistency_stats(series, ref);
                sums[method][0] += rep.variance;
                sums[method][1] += rep.mean_error;
                f << name << "," << method << "," << detail::csv_double(rep.variance) << ","
                  << detail::csv_double(rep.mean_error) << "\n";
            }
        }
        const double n = static_cast<double>(patch_names.size());
        for (const auto& method : m.methods)
            f << "average," << method << "," << detail::csv_double(sums[method][0] / n) << ","
              << detail::csv_double(sums[method][1] / n) << "\n";
    }
}

}  // namespace uwcc
