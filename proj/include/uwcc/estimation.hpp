#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwcc/chart.hpp"
#include "uwcc/errors.hpp"
#include "uwcc/formation.hpp"
#include "uwcc/image.hpp"

namespace uwcc {

/// One chart patch observation at known range: degraded color plus the linear
/// reference reflectance it should map back to.
struct PatchObservation {
    std::string name;
    Rgb observed{};
    Rgb reference{};
};

/// Observations of the white and black patches bundled with range. The spread
/// between the two pins the direct term; the black residual pins backscatter.
struct ChartObservation {
    std::vector<PatchObservation> patches;  // must include "white" and "black"
    double range_m = 0.0;

    const PatchObservation* find(const std::string& name) const {
        for (const auto& p : patches)
            if (p.name == name) return &p;
        return nullptr;
    }

    void validate() const {
        if (!(range_m > 0.0)) throw validation_error("chart range must be positive");
        if (!find("white") || !find("black"))
            throw validation_error("chart observation needs 'white' and 'black' patches");
    }
};

/// Build a ChartObservation by sampling a degraded chart photo. References
/// come from the bundled tabulation; unknown patch names are rejected.
inline ChartObservation observe_chart(const LinearImage& img, const ChartLayout& layout,
                                      double range_m, double trim = 0.1) {
    ChartObservation obs;
    obs.range_m = range_m;
    auto sampled = sample_patches(img, layout, trim);
    for (const auto& [name, color] : sampled) {
        PatchObservation p;
        p.name = name;
        p.observed = color;
        p.reference = chart_reference_linear(name);
        obs.patches.push_back(std::move(p));
    }
    obs.validate();
    return obs;
}

/// Closed-form estimate from the white/black patch pair.
///
/// Per channel, with w/b the observed white/black values and W/B their
/// references at range z:
///   beta_d = -ln((w - b) / (W - B)) / z
///   backscatter = b - B * e^(-beta_d z)
///   beta_b = -ln(1 - backscatter / B_inf) / z
/// The observed spread cancels the backscatter term, which is why two patches
/// at equal range solve the model exactly. A non-positive observed spread is a
/// degenerate observation and errors. Noise can push the backscatter estimate
/// out of range, so it is kept in [0, B_inf) — just below the asymptote, so
/// the log stays finite without disturbing exact in-range recoveries — and
/// negative coefficients clamp to zero.
inline AttenuationCoeffs estimate_closed_form(const ChartObservation& obs,
                                              const VeilingLight& b_inf) {
    obs.validate();
    const PatchObservation& white = *obs.find("white");
    const PatchObservation& black = *obs.find("black");
    const double z = obs.range_m;

    AttenuationCoeffs out;
    out.provenance = Provenance::estimated;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        double ref_spread = white.reference[ci] - black.reference[ci];
        if (!(ref_spread > 0.0))
            throw numeric_error("white/black reference spread must be positive");
        double obs_spread = white.observed[ci] - black.observed[ci];
        if (!(obs_spread > 0.0))
            throw numeric_error("degenerate observation: white patch not brighter than black");

        double beta_d = std::max(0.0, -std::log(obs_spread / ref_spread) / z);

        double backscatter = black.observed[ci] - black.reference[ci] * std::exp(-beta_d * z);
        double binf = b_inf.rgb[ci];
        double beta_b = 0.0;
        if (binf > 0.0) {
            backscatter = std::clamp(backscatter, 0.0, (1.0 - 1e-12) * binf);
            beta_b = std::max(0.0, -std::log(1.0 - backscatter / binf) / z);
        } else if (backscatter > 1e-12) {
            throw numeric_error("observed backscatter with zero veiling light");
        }
        out.beta_d[ci] = beta_d;
        out.beta_b[ci] = beta_b;
    }
    return out;
}

/// Options for the least-squares refinement.
struct RefineOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;
    double initial_damping = 1e-3;
};

/// Sum of squared residuals of one channel over the patch set: for each patch
/// r = model(reference) - observed.
inline double channel_residual_ss(const std::vector<PatchObservation>& patches, int channel,
                                  double beta_d, double beta_b, double z, double b_inf) {
    double ss = 0.0;
    auto ci = static_cast<std::size_t>(channel);
    for (const auto& p : patches) {
        double r = degrade_value(p.reference[ci], beta_d, beta_b, z, b_inf) - p.observed[ci];
        ss += r * r;
    }
    return ss;
}

/// The least-squares objective: squared residuals summed over all channels and
/// patches.
inline double residual(const ChartObservation& obs, const VeilingLight& b_inf,
                       const AttenuationCoeffs& coeffs) {
    double ss = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        ss += channel_residual_ss(obs.patches, c, coeffs.beta_d[ci], coeffs.beta_b[ci], obs.range_m,
                                  b_inf.rgb[ci]);
    }
    if (!std::isfinite(ss)) throw numeric_error("residual is not finite");
    return ss;
}

/// Levenberg-Marquardt refinement of (beta_d, beta_b), run independently per
/// channel over all patches in the observation. Analytic Jacobian:
///   dr/dbeta_d = -z * J_ref * e^(-beta_d z)
///   dr/dbeta_b =  z * B_inf * e^(-beta_b z)
/// Damping scales by 3 on a rejected step and by 1/3 on an accepted one.
/// Coefficients stay >= 0; the result never has a larger residual than the
/// initial guess.
inline AttenuationCoeffs refine_least_squares(const ChartObservation& obs,
                                              const VeilingLight& b_inf,
                                              const AttenuationCoeffs& init,
                                              const RefineOptions& opt = {}) {
    obs.validate();
    init.validate();
    if (obs.patches.size() < 3)
        throw validation_error("least-squares refinement needs at least three patches");
    if (opt.max_iterations <= 0) throw validation_error("max iterations must be positive");
    if (!(opt.step_tolerance > 0.0)) throw validation_error("step tolerance must be positive");
    if (!(opt.initial_damping > 0.0)) throw validation_error("initial damping must be positive");

    const double z = obs.range_m;
    AttenuationCoeffs out = init;
    out.provenance = Provenance::optimized;

    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        double bd = init.beta_d[ci];
        double bb = init.beta_b[ci];
        double binf = b_inf.rgb[ci];
        double lambda = opt.initial_damping;
        double ss = channel_residual_ss(obs.patches, c, bd, bb, z, binf);
        if (!std::isfinite(ss)) throw numeric_error("initial residual is not finite");

        for (int it = 0; it < opt.max_iterations; ++it) {
            // normal equations J^T J + lambda I, J^T r
            double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
            for (const auto& p : obs.patches) {
                double r = degrade_value(p.reference[ci], bd, bb, z, binf) - p.observed[ci];
                double j0 = -z * p.reference[ci] * std::exp(-bd * z);
                double j1 = z * binf * std::exp(-bb * z);
                h00 += j0 * j0;
                h01 += j0 * j1;
                h11 += j1 * j1;
                g0 += j0 * r;
                g1 += j1 * r;
            }
            double a00 = h00 + lambda, a11 = h11 + lambda;
            double det = a00 * a11 - h01 * h01;
            if (!(std::abs(det) > 1e-300)) {
                lambda *= 3.0;
                continue;
            }
            double d0 = -(a11 * g0 - h01 * g1) / det;
            double d1 = -(-h01 * g0 + a00 * g1) / det;

            double nbd = std::max(0.0, bd + d0);
            double nbb = std::max(0.0, bb + d1);
            double nss = channel_residual_ss(obs.patches, c, nbd, nbb, z, binf);
            if (nss <= ss) {
                double step = std::hypot(nbd - bd, nbb - bb);
                bd = nbd;
                bb = nbb;
                ss = nss;
                lambda = std::max(1e-12, lambda / 3.0);
                if (step < opt.step_tolerance) break;
            } else {
                lambda *= 3.0;
                if (lambda > 1e12) break;
            }
        }
        out.beta_d[ci] = bd;
        out.beta_b[ci] = bb;
    }
    return out;
}

// ---- coefficient serialization ---------------------------------------------

inline nlohmann::ordered_json coeffs_to_json(const AttenuationCoeffs& coeffs) {
    nlohmann::ordered_json j;
    j["beta_d"] = {coeffs.beta_d[0], coeffs.beta_d[1], coeffs.beta_d[2]};
    j["beta_b"] = {coeffs.beta_b[0], coeffs.beta_b[1], coeffs.beta_b[2]};
    j["provenance"] = to_string(coeffs.provenance);
    return j;
}

inline AttenuationCoeffs coeffs_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("coefficient JSON must be an object");
    for (const char* key : {"beta_d", "beta_b"}) {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
            throw validation_error(std::string("coefficient JSON needs a 3-element '") + key +
                                   "' array");
        for (const auto& v : j[key])
            if (!v.is_number()) throw validation_error(std::string(key) + " entries must be numbers");
    }
    if (!j.contains("provenance") || !j["provenance"].is_string())
        throw validation_error("coefficient JSON needs a 'provenance' string");
    AttenuationCoeffs out;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        out.beta_d[ci] = j["beta_d"][ci].get<double>();
        out.beta_b[ci] = j["beta_b"][ci].get<double>();
    }
    out.provenance = provenance_from_string(j["provenance"].get<std::string>());
    out.validate();
    return out;
}

inline void save_coeffs(const AttenuationCoeffs& coeffs, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw validation_error("cannot write coefficients: " + path);
    f << coeffs_to_json(coeffs).dump(2) << "\n";
}

inline AttenuationCoeffs load_coeffs(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open coefficients: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("coefficients " + path + " are not valid JSON: " + e.what());
    }
    return coeffs_from_json(j);
}

}  // namespace uwcc
