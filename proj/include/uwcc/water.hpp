#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "uwcc/errors.hpp"
#include "uwcc/io/csv.hpp"
#include "uwcc/spectral.hpp"

namespace uwcc {

/// The ten Jerlov water classes: open-ocean types I..III and coastal 1C..9C.
inline const std::array<std::string, 10>& water_type_names() {
    static const std::array<std::string, 10> names = {
        "I", "IA", "IB", "II", "III", "1C", "3C", "5C", "7C", "9C"};
    return names;
}

/// Optical property tables for one Jerlov water type, resampled to the
/// canonical grid: absorption a, scattering b, diffuse attenuation Kd,
/// all in 1/m.
struct WaterTypeTables {
    std::string type_name;
    SpectralCurve absorption_a;
    SpectralCurve scattering_b;
    SpectralCurve diffuse_kd;

    /// Beam attenuation beta = a + b on the shared grid.
    SpectralCurve beam_attenuation() const {
        std::vector<double> vals(absorption_a.size());
        for (std::size_t i = 0; i < vals.size(); ++i)
            vals[i] = absorption_a.values()[i] + scattering_b.values()[i];
        return SpectralCurve(absorption_a.wavelengths(), std::move(vals));
    }
};

/// Loads the CSV table for one water type (`<data_dir>/jerlov/<name>.csv`,
/// header `wavelength_nm,a,b,kd`) and resamples it to the canonical grid.
inline WaterTypeTables load_water_type(const std::string& name,
                                       const std::filesystem::path& data_dir) {
    const auto& known = water_type_names();
    bool ok = false;
    for (const auto& n : known) ok = ok || (n == name);
    if (!ok) throw validation_error("unknown Jerlov water type: '" + name + "'");

    auto path = data_dir / "jerlov" / (name + ".csv");
    auto table = csv::read_table(path);
    int cw = table.column("wavelength_nm");
    int ca = table.column("a");
    int cb = table.column("b");
    int ck = table.column("kd");
    if (cw < 0 || ca < 0 || cb < 0 || ck < 0)
        throw validation_error("water table missing required columns: " + path.string());

    std::vector<double> lam, a, b, kd;
    for (const auto& row : table.rows) {
        if (static_cast<int>(row.size()) <= std::max(std::max(cw, ca), std::max(cb, ck)))
            throw validation_error("short row in water table: " + path.string());
        lam.push_back(csv::parse_double(row[cw], "wavelength"));
        a.push_back(csv::parse_double(row[ca], "absorption"));
        b.push_back(csv::parse_double(row[cb], "scattering"));
        kd.push_back(csv::parse_double(row[ck], "diffuse attenuation"));
    }

    SpectralCurve curve_a(lam, a), curve_b(lam, b), curve_kd(lam, kd);
    const auto& grid = canonical_grid();
    if (curve_a.min_wavelength() > grid.front() || curve_a.max_wavelength() < grid.back())
        throw validation_error("water table does not cover the 400-700 nm grid: " + path.string());

    return WaterTypeTables{name,
                           resample_curve(curve_a, grid),
                           resample_curve(curve_b, grid),
                           resample_curve(curve_kd, grid)};
}

}  // namespace uwcc
