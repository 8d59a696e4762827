#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "uwcc/errors.hpp"
#include "uwcc/image.hpp"

namespace uwcc {

namespace detail {
inline double norm3(const Rgb& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
}  // namespace detail

/// How a color is reduced to its intensity-free direction before comparison.
enum class ColorNormalization {
    unit_l2,       // divide by the L2 norm (keeps the metric property)
    chromaticity,  // divide by R+G+B (sensitivity-check alternative)
};

/// Euclidean distance between the intensity-normalized colors. Invariant to
/// per-color positive scaling, so it scores chromatic fidelity rather than
/// brightness. Range [0, 2] under unit_l2; zero-norm inputs are rejected.
inline double normalized_color_distance(const Rgb& observed, const Rgb& reference,
                                        ColorNormalization norm = ColorNormalization::unit_l2) {
    double no, nr;
    if (norm == ColorNormalization::unit_l2) {
        no = detail::norm3(observed);
        nr = detail::norm3(reference);
    } else {
        no = observed[0] + observed[1] + observed[2];
        nr = reference[0] + reference[1] + reference[2];
    }
    if (!(no > 0.0) || !(nr > 0.0))
        throw numeric_error("normalized color distance undefined for zero-norm colors");
    double ss = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        double d = observed[ci] / no - reference[ci] / nr;
        ss += d * d;
    }
    return std::sqrt(ss);
}

/// Cross-depth consistency of one patch corrected by one method: per-channel
/// population variance summed over channels, plus the distance between the
/// cross-depth mean color and the reference.
struct ConsistencyReport {
    double variance = 0.0;    // sum over channels of population variance
    double mean_error = 0.0;  // || mean color - reference ||_2
    Rgb mean{0.0, 0.0, 0.0};
};

inline ConsistencyReport consistency_stats(const std::vector<Rgb>& samples, const Rgb& reference) {
    if (samples.size() < 2)
        throw validation_error("consistency needs a series of at least two samples");
    ConsistencyReport rep;
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples)
        for (int c = 0; c < 3; ++c) rep.mean[static_cast<std::size_t>(c)] += s[static_cast<std::size_t>(c)];
    for (int c = 0; c < 3; ++c) rep.mean[static_cast<std::size_t>(c)] /= n;

    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        double acc = 0.0;
        for (const auto& s : samples) {
            double d = s[ci] - rep.mean[ci];
            acc += d * d;
        }
        rep.variance += acc / n;
    }
    Rgb diff;
    for (int c = 0; c < 3; ++c) {
        auto ci = static_cast<std::size_t>(c);
        diff[ci] = rep.mean[ci] - reference[ci];
    }
    rep.mean_error = detail::norm3(diff);
    return rep;
}

}  // namespace uwcc
