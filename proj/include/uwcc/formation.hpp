#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "uwcc/camera.hpp"
#include "uwcc/errors.hpp"
#include "uwcc/image.hpp"
#include "uwcc/spectral.hpp"
#include "uwcc/water.hpp"

namespace uwcc {

/// Depth-dependent ambient light model. `as_written` evaluates
/// E = E0 * Kd / d; `exponential` uses the standard decay E0 * exp(-Kd * d)
/// and is the default.
enum class AmbientModel { as_written, exponential };

inline std::string to_string(AmbientModel m) {
    return m == AmbientModel::as_written ? "as_written" : "exponential";
}
inline AmbientModel ambient_model_from_string(const std::string& s) {
    if (s == "as_written" || s == "as-written") return AmbientModel::as_written;
    if (s == "exponential") return AmbientModel::exponential;
    throw validation_error("unknown ambient model: '" + s + "'");
}

/// Everything the spectral terms depend on: water tables, sensor response,
/// water depth (vertical, from a pressure sensor) and imaging conditions.
/// Immutable after construction; safe to share across threads.
struct SceneContext {
    WaterTypeTables water;
    CameraResponse camera;
    double depth_m = 1.0;                    // vertical depth d, > 0
    std::optional<double> exposure_k;        // empty -> auto exposure
    double surface_light_e0 = 1.0;           // E0
    double reflectance_rho = 1.0;            // rho in (0,1]
    AmbientModel ambient_model = AmbientModel::exponential;

    void validate() const {
        if (water.absorption_a.empty() || water.scattering_b.empty() || water.diffuse_kd.empty())
            throw validation_error("scene context has no water tables loaded");
        if (camera.red.empty() || camera.green.empty() || camera.blue.empty())
            throw validation_error("scene context has no sensor response loaded");
        if (!(depth_m > 0.0)) throw validation_error("depth must be positive");
        if (exposure_k && !(*exposure_k > 0.0))
            throw validation_error("exposure scalar must be positive");
        if (!(surface_light_e0 > 0.0)) throw validation_error("surface light must be positive");
        if (!(reflectance_rho > 0.0) || reflectance_rho > 1.0)
            throw validation_error("reflectance must be in (0,1]");
    }
};

/// Water color at infinite viewing distance, per channel, in [0,1].
struct VeilingLight {
    Rgb rgb{0.0, 0.0, 0.0};
};

enum class Provenance { manual, estimated, optimized };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::manual: return "manual";
        case Provenance::estimated: return "estimated";
        default: return "optimized";
    }
}
inline Provenance provenance_from_string(const std::string& s) {
    if (s == "manual") return Provenance::manual;
    if (s == "estimated") return Provenance::estimated;
    if (s == "optimized") return Provenance::optimized;
    throw validation_error("unknown provenance: '" + s + "'");
}

/// Per-channel attenuation pair (1/m): beta_d governs the direct signal,
/// beta_b the backscatter buildup.
struct AttenuationCoeffs {
    Rgb beta_d{0.0, 0.0, 0.0};
    Rgb beta_b{0.0, 0.0, 0.0};
    Provenance provenance = Provenance::manual;

    void validate() const {
        for (int c = 0; c < 3; ++c) {
            if (!(beta_d[static_cast<std::size_t>(c)] >= 0.0) ||
                !(beta_b[static_cast<std::size_t>(c)] >= 0.0))
                throw validation_error("attenuation coefficients must be >= 0");
        }
    }
};

/// Floor on the direct transmission during inversion. Keeps the red channel
/// bounded when e^(-beta_d z) collapses at depth.
inline constexpr double kEpsilonDirect = 1e-3;

// ---- spectral terms ---------------------------------------------------------

/// Ambient light E(d, lambda) on the canonical grid.
inline SpectralCurve ambient_light(const SceneContext& ctx) {
    ctx.validate();
    const SpectralCurve& kd = ctx.water.diffuse_kd;
    std::vector<double> vals(kd.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double k = kd.values()[i];
        double e = ctx.ambient_model == AmbientModel::as_written
                       ? ctx.surface_light_e0 * k / ctx.depth_m
                       : ctx.surface_light_e0 * std::exp(-k * ctx.depth_m);
        vals[i] = std::max(0.0, e);
    }
    return SpectralCurve(kd.wavelengths(), std::move(vals));
}

namespace detail {
/// Per-channel integral of S_c(lambda) * b * E / beta before exposure scaling.
inline Rgb veiling_integrals(const SceneContext& ctx) {
    SpectralCurve ambient = ambient_light(ctx);
    const auto& lam = ambient.wavelengths();
    const auto& a = ctx.water.absorption_a.values();
    const auto& b = ctx.water.scattering_b.values();
    const SpectralCurve* channels[3] = {&ctx.camera.red, &ctx.camera.green, &ctx.camera.blue};

    Rgb out{};
    for (int c = 0; c < 3; ++c) {
        std::vector<double> integrand(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) {
            double beta = a[i] + b[i];
            if (!(beta > 0.0))
                throw numeric_error("beam attenuation is zero on the grid; veiling integrand undefined");
            integrand[i] = channels[c]->values()[i] * b[i] * ambient.values()[i] / beta;
        }
        out[static_cast<std::size_t>(c)] = trapezoid(lam, integrand);
    }
    return out;
}
}  // namespace detail

/// The exposure scalar actually used: the configured one, or when absent an
/// automatic value chosen so the brightest veiling channel lands at 0.7.
inline double resolve_exposure(const SceneContext& ctx) {
    if (ctx.exposure_k) return *ctx.exposure_k;
    Rgb raw = detail::veiling_integrals(ctx);
    double peak = std::max({raw[0], raw[1], raw[2]});
    return peak > 0.0 ? peak / 0.7 : 1.0;
}

/// Wideband veiling light B_inf per channel: the b*E/beta spectral integral
/// weighted by the sensor response and scaled by 1/k, clamped to [0,1].
inline VeilingLight veiling_light(const SceneContext& ctx) {
    Rgb raw = detail::veiling_integrals(ctx);
    double k = resolve_exposure(ctx);
    VeilingLight v;
    for (int c = 0; c < 3; ++c) v.rgb[static_cast<std::size_t>(c)] = clamp01(raw[static_cast<std::size_t>(c)] / k);
    return v;
}

/// Fallback when tables are unavailable: average of the brightest background
/// pixels, ranked by blue channel value (blue dominates open water). The top
/// `percentile` fraction of the region is used; percentile 1.0 is the plain
/// region mean. The region defaults to the whole image.
inline VeilingLight background_veiling_estimate(const LinearImage& img, double percentile = 0.1,
                                                int rx = 0, int ry = 0, int rw = -1, int rh = -1) {
    if (img.empty()) throw validation_error("cannot estimate veiling from an empty image");
    if (!(percentile > 0.0) || percentile > 1.0)
        throw validation_error("percentile must be in (0,1]");
    if (rw < 0) rw = img.width;
    if (rh < 0) rh = img.height;
    if (rx < 0 || ry < 0 || rw <= 0 || rh <= 0 || rx + rw > img.width || ry + rh > img.height)
        throw validation_error("background region outside image bounds");

    std::vector<std::size_t> order(static_cast<std::size_t>(rw) * rh);
    std::vector<Rgb> px(order.size());
    std::size_t n = 0;
    for (int y = ry; y < ry + rh; ++y)
        for (int x = rx; x < rx + rw; ++x) px[n] = img.pixel(x, y), order[n] = n, ++n;

    // descending blue, index ascending on ties, so selection is deterministic
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return px[a][2] > px[b][2]; });

    std::size_t take = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n)));
    take = std::max<std::size_t>(1, std::min(take, n));

    Rgb sum{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < take; ++i)
        for (int c = 0; c < 3; ++c) sum[static_cast<std::size_t>(c)] += px[order[i]][static_cast<std::size_t>(c)];
    VeilingLight v;
    for (int c = 0; c < 3; ++c) v.rgb[static_cast<std::size_t>(c)] = clamp01(sum[static_cast<std::size_t>(c)] / static_cast<double>(take));
    return v;
}

// ---- per-pixel kernels ------------------------------------------------------
// Unvalidated scalar forms of the degradation and its inverse; the image-level
// wrappers below enforce the range preconditions.

inline double degrade_value(double j, double beta_d, double beta_b, double z, double b_inf,
                            double rho = 1.0) {
    return j * rho * std::exp(-beta_d * z) + b_inf * (1.0 - std::exp(-beta_b * z));
}

inline double invert_value(double i, double beta_d, double beta_b, double z, double b_inf,
                           double eps_direct = kEpsilonDirect) {
    double backscatter = b_inf * (1.0 - std::exp(-beta_b * z));
    double numerator = std::max(0.0, i - backscatter);
    double transmission = std::max(std::exp(-beta_d * z), eps_direct);
    return numerator / transmission;
}

// ---- image operations -------------------------------------------------------

/// Forward degradation: I = J * rho * e^(-beta_d z) + B_inf (1 - e^(-beta_b z)),
/// clamped to [0,1].
inline LinearImage forward_degrade(const LinearImage& j, const AttenuationCoeffs& coeffs,
                                   const VeilingLight& b_inf, const RangeField& z,
                                   double rho = 1.0) {
    if (j.empty()) throw validation_error("cannot degrade an empty image");
    coeffs.validate();
    z.validate_for(j);
    if (!(rho > 0.0) || rho > 1.0) throw validation_error("reflectance must be in (0,1]");

    LinearImage out;
    out.width = j.width;
    out.height = j.height;
    out.pixels.resize(j.pixels.size());
    for (int y = 0; y < j.height; ++y) {
        for (int x = 0; x < j.width; ++x) {
            double zz = z.at(x, y);
            for (int c = 0; c < 3; ++c) {
                auto ci = static_cast<std::size_t>(c);
                out.at(x, y, c) = clamp01(
                    degrade_value(j.at(x, y, c), coeffs.beta_d[ci], coeffs.beta_b[ci], zz,
                                  b_inf.rgb[ci], rho));
            }
        }
    }
    return out;
}

/// Inversion of the degradation: subtract the backscatter term, then divide by
/// the direct transmission floored at `eps_direct`. Output clamped to [0,1].
inline LinearImage invert(const LinearImage& i, const AttenuationCoeffs& coeffs,
                          const VeilingLight& b_inf, const RangeField& z,
                          double eps_direct = kEpsilonDirect) {
    if (i.empty()) throw validation_error("cannot invert an empty image");
    coeffs.validate();
    z.validate_for(i);
    if (!(eps_direct > 0.0)) throw validation_error("direct-transmission floor must be positive");

    LinearImage out;
    out.width = i.width;
    out.height = i.height;
    out.pixels.resize(i.pixels.size());
    for (int y = 0; y < i.height; ++y) {
        for (int x = 0; x < i.width; ++x) {
            double zz = z.at(x, y);
            for (int c = 0; c < 3; ++c) {
                auto ci = static_cast<std::size_t>(c);
                out.at(x, y, c) = clamp01(
                    invert_value(i.at(x, y, c), coeffs.beta_d[ci], coeffs.beta_b[ci], zz,
                                 b_inf.rgb[ci], eps_direct));
            }
        }
    }
    return out;
}

/// Single-coefficient inversion (the pre-revision model): beta_d == beta_b.
inline LinearImage cuifm_invert(const LinearImage& i, const Rgb& beta, const VeilingLight& b_inf,
                                const RangeField& z, double eps_direct = kEpsilonDirect) {
    AttenuationCoeffs coeffs;
    coeffs.beta_d = beta;
    coeffs.beta_b = beta;
    coeffs.provenance = Provenance::manual;
    return invert(i, coeffs, b_inf, z, eps_direct);
}

// ---- reference coefficients from water tables -------------------------------

/// Wideband reduction of the spectral model at range z: effective direct
/// coefficient from the sensor-weighted transmission integral, effective
/// backscatter coefficient from the backscatter accumulated over z against its
/// asymptote. Useful for simulation when no chart is available.
inline AttenuationCoeffs derive_water_coeffs(const SceneContext& ctx, double z) {
    ctx.validate();
    if (!(z > 0.0)) throw validation_error("range must be positive");

    SpectralCurve ambient = ambient_light(ctx);
    const auto& lam = ambient.wavelengths();
    const auto& a = ctx.water.absorption_a.values();
    const auto& b = ctx.water.scattering_b.values();
    const SpectralCurve* channels[3] = {&ctx.camera.red, &ctx.camera.green, &ctx.camera.blue};

    AttenuationCoeffs out;
    out.provenance = Provenance::manual;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> direct_num(lam.size()), direct_den(lam.size());
        std::vector<double> back_num(lam.size()), back_den(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) {
            double beta = a[i] + b[i];
            if (!(beta > 0.0)) throw numeric_error("beam attenuation is zero on the grid");
            double se = channels[c]->values()[i] * ambient.values()[i];
            direct_num[i] = se * std::exp(-beta * z);
            direct_den[i] = se;
            double sb = channels[c]->values()[i] * b[i] * ambient.values()[i] / beta;
            back_num[i] = sb * (1.0 - std::exp(-beta * z));
            back_den[i] = sb;
        }
        double td = trapezoid(lam, direct_num) / trapezoid(lam, direct_den);
        double accum = trapezoid(lam, back_num) / trapezoid(lam, back_den);
        auto ci = static_cast<std::size_t>(c);
        out.beta_d[ci] = std::max(0.0, -std::log(td) / z);
        out.beta_b[ci] = std::max(0.0, -std::log(std::max(1e-300, 1.0 - accum)) / z);
    }
    return out;
}

}  // namespace uwcc
