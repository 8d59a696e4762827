#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "uwcc/errors.hpp"
#include "uwcc/io/csv.hpp"
#include "uwcc/spectral.hpp"

namespace uwcc {

/// Relative spectral sensitivity of the three sensor channels,
/// peak-normalized to 1 on the canonical grid.
struct CameraResponse {
    SpectralCurve red;
    SpectralCurve green;
    SpectralCurve blue;
};

namespace detail {
inline SpectralCurve peak_normalize(const SpectralCurve& c) {
    double peak = *std::max_element(c.values().begin(), c.values().end());
    if (peak <= 0.0) throw validation_error("camera response channel is all zero");
    std::vector<double> v(c.values());
    for (double& x : v) x /= peak;
    return SpectralCurve(c.wavelengths(), std::move(v));
}
}  // namespace detail

/// Loads a sensitivity CSV (header `wavelength_nm,r,g,b`), resamples to the
/// canonical grid and peak-normalizes each channel.
inline CameraResponse load_camera_response(const std::filesystem::path& path) {
    auto table = csv::read_table(path);
    int cw = table.column("wavelength_nm");
    int cr = table.column("r");
    int cg = table.column("g");
    int cb = table.column("b");
    if (cw < 0 || cr < 0 || cg < 0 || cb < 0)
        throw validation_error("camera response missing required columns: " + path.string());

    std::vector<double> lam, r, g, b;
    for (const auto& row : table.rows) {
        if (static_cast<int>(row.size()) <= std::max(std::max(cw, cr), std::max(cg, cb)))
            throw validation_error("short row in camera response: " + path.string());
        lam.push_back(csv::parse_double(row[cw], "wavelength"));
        r.push_back(csv::parse_double(row[cr], "red sensitivity"));
        g.push_back(csv::parse_double(row[cg], "green sensitivity"));
        b.push_back(csv::parse_double(row[cb], "blue sensitivity"));
    }

    SpectralCurve curve_r(lam, r), curve_g(lam, g), curve_b(lam, b);
    const auto& grid = canonical_grid();
    if (curve_r.min_wavelength() > grid.front() || curve_r.max_wavelength() < grid.back())
        throw validation_error("camera response does not cover the 400-700 nm grid: " +
                               path.string());

    return CameraResponse{detail::peak_normalize(resample_curve(curve_r, grid)),
                          detail::peak_normalize(resample_curve(curve_g, grid)),
                          detail::peak_normalize(resample_curve(curve_b, grid))};
}

/// Parametric stand-in used when no datasheet CSV is supplied: Gaussian lobes
/// peaking at 600/530/470 nm (R/G/B) with a 50 nm standard deviation.
inline CameraResponse default_camera_response() {
    const auto& grid = canonical_grid();
    auto lobe = [&](double peak_nm) {
        std::vector<double> v;
        v.reserve(grid.size());
        for (double lam : grid) {
            double d = (lam - peak_nm) / 50.0;
            v.push_back(std::exp(-0.5 * d * d));
        }
        return detail::peak_normalize(SpectralCurve(grid, std::move(v)));
    };
    return CameraResponse{lobe(600.0), lobe(530.0), lobe(470.0)};
}

}  // namespace uwcc
