#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "uwcc/errors.hpp"

namespace uwcc {

/// A sampled function of wavelength (nm). Wavelengths are strictly
/// increasing, values are nonnegative. Immutable after construction. The
/// default-constructed curve is empty and only exists so aggregates holding
/// curves can be default-constructed; evaluating it is an error.
class SpectralCurve {
public:
    SpectralCurve() = default;

    SpectralCurve(std::vector<double> wavelengths_nm, std::vector<double> values)
        : wavelengths_(std::move(wavelengths_nm)), values_(std::move(values)) {
        if (wavelengths_.size() < 2)
            throw validation_error("spectral curve needs at least 2 samples");
        if (wavelengths_.size() != values_.size())
            throw validation_error("spectral curve wavelength/value length mismatch");
        for (std::size_t i = 1; i < wavelengths_.size(); ++i)
            if (!(wavelengths_[i] > wavelengths_[i - 1]))
                throw validation_error("spectral curve wavelengths not strictly increasing");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw validation_error("spectral curve values must be finite and >= 0");
    }

    const std::vector<double>& wavelengths() const { return wavelengths_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return wavelengths_.size(); }
    bool empty() const { return wavelengths_.empty(); }
    double min_wavelength() const {
        require_nonempty();
        return wavelengths_.front();
    }
    double max_wavelength() const {
        require_nonempty();
        return wavelengths_.back();
    }

    /// Piecewise-linear interpolation. Exact at sample points, no extrapolation.
    double value_at(double lambda_nm) const {
        require_nonempty();
        if (lambda_nm < min_wavelength() || lambda_nm > max_wavelength())
            throw validation_error("wavelength outside curve support");
        auto it = std::lower_bound(wavelengths_.begin(), wavelengths_.end(), lambda_nm);
        std::size_t hi = static_cast<std::size_t>(it - wavelengths_.begin());
        if (hi < wavelengths_.size() && wavelengths_[hi] == lambda_nm)
            return values_[hi];
        std::size_t lo = hi - 1;
        double t = (lambda_nm - wavelengths_[lo]) / (wavelengths_[hi] - wavelengths_[lo]);
        return values_[lo] + t * (values_[hi] - values_[lo]);
    }

private:
    void require_nonempty() const {
        if (wavelengths_.empty()) throw validation_error("spectral curve is empty");
    }

    std::vector<double> wavelengths_;
    std::vector<double> values_;
};

/// Integration grid shared by every spectral quantity: 400-700 nm in 10 nm
/// steps, 31 samples.
inline const std::vector<double>& canonical_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int nm = 400; nm <= 700; nm += 10) g.push_back(static_cast<double>(nm));
        return g;
    }();
    return grid;
}

/// Resample onto `grid` by linear interpolation. The grid must lie inside the
/// curve's support.
inline SpectralCurve resample_curve(const SpectralCurve& curve, const std::vector<double>& grid) {
    std::vector<double> vals;
    vals.reserve(grid.size());
    for (double lambda : grid) vals.push_back(curve.value_at(lambda));
    return SpectralCurve(std::vector<double>(grid), std::move(vals));
}

/// Trapezoidal integral of the curve over its own grid.
inline double trapezoid(const SpectralCurve& curve) {
    const auto& x = curve.wavelengths();
    const auto& y = curve.values();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        total += (x[i + 1] - x[i]) * (y[i] + y[i + 1]) * 0.5;
    return total;
}

/// Trapezoidal integral of sampled values `y` over wavelengths `x`.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        total += (x[i + 1] - x[i]) * (y[i] + y[i + 1]) * 0.5;
    return total;
}

}  // namespace uwcc
