#pragma once

#include <algorithm>

#include "uwcc/errors.hpp"
#include "uwcc/formation.hpp"
#include "uwcc/image.hpp"

namespace uwcc {

/// Gray-world white balance: scale each channel by mean(all)/mean(channel) so
/// the global mean becomes achromatic, then clamp to [0,1]. No physics, no
/// range information — the classic non-physical baseline.
inline LinearImage gray_world(const LinearImage& img) {
    if (img.empty()) throw validation_error("cannot white-balance an empty image");

    Rgb mean{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mean[i % 3] += img.pixels[i];
    const double n = static_cast<double>(img.pixels.size()) / 3.0;
    for (int c = 0; c < 3; ++c) mean[static_cast<std::size_t>(c)] /= n;

    const double overall = (mean[0] + mean[1] + mean[2]) / 3.0;
    Rgb gain;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        if (!(mean[ci] > 0.0))
            throw numeric_error("gray-world gain undefined: a channel mean is zero");
        gain[ci] = overall / mean[ci];
    }

    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = clamp01(img.pixels[i] * gain[i % 3]);
    return out;
}

/// The pre-revision single-coefficient correction: invert with
/// beta_d == beta_b == beta. Shares all floors/clamps with `invert`.
inline LinearImage cuifm_correct(const LinearImage& img, const Rgb& beta,
                                 const VeilingLight& b_inf, const RangeField& z,
                                 double eps_direct = kEpsilonDirect) {
    return cuifm_invert(img, beta, b_inf, z, eps_direct);
}

}  // namespace uwcc
