#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "uwcc/errors.hpp"
#include "uwcc/formation.hpp"
#include "uwcc/image.hpp"
#include "uwcc/io/csv.hpp"

namespace uwcc {

/// Tracked feature point with an estimated range to the scene at that pixel.
struct SparsePoint {
    int x = 0;
    int y = 0;
    double z = 0.0;  // range before unit scaling, always > 0
};

/// Keypoint range estimates from visual odometry. Odometry ranges are only
/// known up to a unit factor, so `scale` converts them to metres.
struct SparseRangeMap {
    std::vector<SparsePoint> points;
    double scale = 1.0;

    void validate() const {
        if (points.empty()) throw validation_error("sparse range map has no points");
        if (!(scale > 0.0)) throw validation_error("sparse map scale must be positive");
        for (const auto& p : points)
            if (!(p.z > 0.0)) throw validation_error("sparse map range values must be positive");
    }

    void validate_for(const LinearImage& img) const {
        validate();
        for (const auto& p : points)
            if (p.x < 0 || p.y < 0 || p.x >= img.width || p.y >= img.height)
                throw validation_error("sparse map point outside image bounds");
    }
};

/// Parse a keypoint CSV with header `x,y,z`. Row order is preserved; it is
/// the tie-break identity for overlapping patches.
inline SparseRangeMap ingest_sparse_map(const std::string& path, double scale = 1.0) {
    csv::Table t = csv::read_table(path);
    const int cx = t.column("x"), cy = t.column("y"), cz = t.column("z");
    if (cx < 0 || cy < 0 || cz < 0)
        throw validation_error("sparse map needs an x,y,z header: " + path);
    const int max_col = std::max({cx, cy, cz});
    SparseRangeMap map;
    map.scale = scale;
    for (const auto& row : t.rows) {
        if (static_cast<int>(row.size()) <= max_col)
            throw validation_error("short row in sparse map: " + path);
        SparsePoint p;
        double fx = csv::parse_double(row[static_cast<std::size_t>(cx)], "sparse map x");
        double fy = csv::parse_double(row[static_cast<std::size_t>(cy)], "sparse map y");
        if (fx != std::floor(fx) || fy != std::floor(fy))
            throw validation_error("sparse map coordinates must be integers (" + path + ")");
        p.x = static_cast<int>(fx);
        p.y = static_cast<int>(fy);
        p.z = csv::parse_double(row[static_cast<std::size_t>(cz)], "sparse map z");
        map.points.push_back(p);
    }
    map.validate();
    return map;
}

/// Correct only the square patches around tracked keypoints; the rest of the
/// frame passes through untouched (exact equality). Each patch is the
/// axis-aligned square of side `patch_px` centered on its keypoint, clipped to
/// the frame, and is corrected with that point's range z * scale. Where
/// patches overlap, a pixel belongs to the nearest keypoint by Euclidean
/// pixel distance; ties go to the point that appears first in the map.
inline LinearImage correct_sparse(const LinearImage& img, const SparseRangeMap& map,
                                  const AttenuationCoeffs& coeffs, const VeilingLight& b_inf,
                                  int patch_px = 64, double eps_direct = kEpsilonDirect) {
    if (img.empty()) throw validation_error("cannot correct an empty image");
    if (patch_px <= 0) throw validation_error("patch size must be positive");
    map.validate_for(img);
    coeffs.validate();

    // Ownership raster over the patch union: squared distance to the owning
    // keypoint, and that keypoint's index. Smaller index wins exact ties.
    constexpr std::int32_t kUnowned = -1;
    const std::size_t npx = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    std::vector<std::int64_t> best_d2(npx, std::numeric_limits<std::int64_t>::max());
    std::vector<std::int32_t> owner(npx, kUnowned);

    const int half_lo = patch_px / 2;             // pixels before the keypoint
    const int half_hi = patch_px - half_lo - 1;   // pixels after it
    for (std::size_t i = 0; i < map.points.size(); ++i) {
        const auto& p = map.points[i];
        const int x0 = std::max(0, p.x - half_lo), x1 = std::min(img.width - 1, p.x + half_hi);
        const int y0 = std::max(0, p.y - half_lo), y1 = std::min(img.height - 1, p.y + half_hi);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const std::int64_t dx = x - p.x, dy = y - p.y;
                const std::int64_t d2 = dx * dx + dy * dy;
                const std::size_t idx =
                    static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) +
                    static_cast<std::size_t>(x);
                if (d2 < best_d2[idx] ||
                    (d2 == best_d2[idx] && static_cast<std::int32_t>(i) < owner[idx])) {
                    best_d2[idx] = d2;
                    owner[idx] = static_cast<std::int32_t>(i);
                }
            }
        }
    }

    LinearImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t idx =
                static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) +
                static_cast<std::size_t>(x);
            if (owner[idx] == kUnowned) continue;
            const double z = map.points[static_cast<std::size_t>(owner[idx])].z * map.scale;
            for (int c = 0; c < 3; ++c) {
                auto ci = static_cast<std::size_t>(c);
                out.at(x, y, c) = clamp01(invert_value(img.at(x, y, c), coeffs.beta_d[ci],
                                                       coeffs.beta_b[ci], z, b_inf.rgb[ci],
                                                       eps_direct));
            }
        }
    }
    return out;
}

}  // namespace uwcc
