#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwcc/errors.hpp"
#include "uwcc/image.hpp"

namespace uwcc {

/// One patch of the 24-patch calibration chart: name plus the 8-bit sRGB
/// coordinates of the classic tabulation.
struct ChartPatch {
    std::string name;
    std::array<std::uint8_t, 3> srgb;
};

/// The classic 24-patch chart, row-major (4 rows x 6 columns): 18 color
/// patches followed by the 6-step neutral wedge ending in white and black.
inline const std::vector<ChartPatch>& chart_patches() {
    static const std::vector<ChartPatch> patches = {
        {"dark_skin", {115, 82, 68}},     {"light_skin", {194, 150, 130}},
        {"blue_sky", {98, 122, 157}},     {"foliage", {87, 108, 67}},
        {"blue_flower", {133, 128, 177}}, {"bluish_green", {103, 189, 170}},
        {"orange", {214, 126, 44}},       {"purplish_blue", {80, 91, 166}},
        {"moderate_red", {193, 90, 99}},  {"purple", {94, 60, 108}},
        {"yellow_green", {157, 188, 64}}, {"orange_yellow", {224, 163, 46}},
        {"blue", {56, 61, 150}},          {"green", {70, 148, 73}},
        {"red", {175, 54, 60}},           {"yellow", {231, 199, 31}},
        {"magenta", {187, 86, 149}},      {"cyan", {8, 133, 161}},
        {"white", {243, 243, 242}},       {"neutral_8", {200, 200, 200}},
        {"neutral_65", {160, 160, 160}},  {"neutral_5", {122, 122, 121}},
        {"neutral_35", {85, 85, 85}},     {"black", {52, 52, 52}},
    };
    return patches;
}

inline int chart_patch_index(const std::string& name) {
    const auto& patches = chart_patches();
    for (std::size_t i = 0; i < patches.size(); ++i)
        if (patches[i].name == name) return static_cast<int>(i);
    throw validation_error("unknown chart patch: '" + name + "'");
}

/// Linear reference reflectance of a named patch (sRGB decode of the 8-bit
/// tabulated coordinates).
inline Rgb chart_reference_linear(const std::string& name) {
    const ChartPatch& p = chart_patches()[static_cast<std::size_t>(chart_patch_index(name))];
    Rgb out;
    for (int c = 0; c < 3; ++c)
        out[static_cast<std::size_t>(c)] = srgb_decode_value(p.srgb[static_cast<std::size_t>(c)]);
    return out;
}

/// Rectangular patch region inside a chart photo, pixel units.
struct PatchRegion {
    std::string name;
    int x = 0, y = 0, w = 0, h = 0;
};

/// Locations of the chart patches inside one frame. Regions must be named,
/// positive-sized, and pairwise disjoint.
struct ChartLayout {
    std::vector<PatchRegion> patches;

    const PatchRegion* find(const std::string& name) const {
        for (const auto& p : patches)
            if (p.name == name) return &p;
        return nullptr;
    }

    void validate() const {
        if (patches.empty()) throw validation_error("chart layout has no patches");
        for (const auto& p : patches) {
            if (p.name.empty()) throw validation_error("chart layout patch with empty name");
            if (p.w <= 0 || p.h <= 0)
                throw validation_error("chart patch '" + p.name + "' has non-positive size");
            if (p.x < 0 || p.y < 0)
                throw validation_error("chart patch '" + p.name + "' has negative origin");
        }
        for (std::size_t i = 0; i < patches.size(); ++i) {
            for (std::size_t j = i + 1; j < patches.size(); ++j) {
                const auto& a = patches[i];
                const auto& b = patches[j];
                if (a.name == b.name)
                    throw validation_error("duplicate chart patch name '" + a.name + "'");
                bool overlap_x = a.x < b.x + b.w && b.x < a.x + a.w;
                bool overlap_y = a.y < b.y + b.h && b.y < a.y + a.h;
                if (overlap_x && overlap_y)
                    throw validation_error("chart patches '" + a.name + "' and '" + b.name +
                                           "' overlap");
            }
        }
    }

    void validate_for(const LinearImage& img) const {
        validate();
        for (const auto& p : patches) {
            if (p.x + p.w > img.width || p.y + p.h > img.height)
                throw validation_error("chart patch '" + p.name + "' outside image bounds");
        }
    }
};

inline ChartLayout chart_layout_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("patches") || !j["patches"].is_array())
        throw validation_error("chart layout JSON must be an object with a 'patches' array");
    ChartLayout layout;
    for (const auto& e : j["patches"]) {
        if (!e.is_object()) throw validation_error("chart layout patch entries must be objects");
        for (const char* key : {"name", "x", "y", "w", "h"})
            if (!e.contains(key))
                throw validation_error(std::string("chart layout patch missing '") + key + "'");
        PatchRegion r;
        if (!e["name"].is_string()) throw validation_error("chart patch 'name' must be a string");
        r.name = e["name"].get<std::string>();
        for (const char* key : {"x", "y", "w", "h"})
            if (!e[key].is_number_integer())
                throw validation_error("chart patch '" + r.name + "' field '" + key +
                                       "' must be an integer");
        r.x = e["x"].get<int>();
        r.y = e["y"].get<int>();
        r.w = e["w"].get<int>();
        r.h = e["h"].get<int>();
        layout.patches.push_back(std::move(r));
    }
    layout.validate();
    return layout;
}

inline ChartLayout load_chart_layout(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open chart layout: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("chart layout " + path + " is not valid JSON: " + e.what());
    }
    return chart_layout_from_json(j);
}

inline nlohmann::ordered_json chart_layout_to_json(const ChartLayout& layout) {
    nlohmann::ordered_json j;
    j["patches"] = nlohmann::ordered_json::array();
    for (const auto& p : layout.patches) {
        nlohmann::ordered_json e;
        e["name"] = p.name;
        e["x"] = p.x;
        e["y"] = p.y;
        e["w"] = p.w;
        e["h"] = p.h;
        j["patches"].push_back(std::move(e));
    }
    return j;
}

/// Synthesized chart photo: the 24 patches on a 4x6 grid, each patch_px
/// square, separated and surrounded by a gutter_px neutral border. Returns
/// the linear image and the matching layout.
struct RenderedChart {
    LinearImage image;
    ChartLayout layout;
};

inline RenderedChart reference_chart(int patch_px = 32, int gutter_px = 4,
                                     double gutter_value = 0.18) {
    if (patch_px <= 0) throw validation_error("patch size must be positive");
    if (gutter_px < 0) throw validation_error("gutter size must be non-negative");
    const int cols = 6, rows = 4;
    const int w = cols * patch_px + (cols + 1) * gutter_px;
    const int h = rows * patch_px + (rows + 1) * gutter_px;

    RenderedChart out;
    out.image = LinearImage::create(w, h, Rgb{gutter_value, gutter_value, gutter_value});
    const auto& patches = chart_patches();
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto idx = static_cast<std::size_t>(r * cols + c);
            Rgb lin = chart_reference_linear(patches[idx].name);
            PatchRegion region;
            region.name = patches[idx].name;
            region.x = gutter_px + c * (patch_px + gutter_px);
            region.y = gutter_px + r * (patch_px + gutter_px);
            region.w = patch_px;
            region.h = patch_px;
            for (int y = region.y; y < region.y + region.h; ++y)
                for (int x = region.x; x < region.x + region.w; ++x)
                    out.image.set_pixel(x, y, lin);
            out.layout.patches.push_back(std::move(region));
        }
    }
    return out;
}

/// Robust per-channel mean of a patch region: values are sorted per channel
/// and floor(trim * n) samples are dropped from each tail before averaging.
inline Rgb sample_patch(const LinearImage& img, const PatchRegion& region, double trim = 0.1) {
    if (region.w <= 0 || region.h <= 0)
        throw validation_error("chart patch '" + region.name + "' has non-positive size");
    if (region.x < 0 || region.y < 0 || region.x + region.w > img.width ||
        region.y + region.h > img.height)
        throw validation_error("chart patch '" + region.name + "' outside image bounds");
    if (!(trim >= 0.0) || trim > 0.4) throw validation_error("trim fraction must be in [0,0.4]");

    const std::size_t n = static_cast<std::size_t>(region.w) * static_cast<std::size_t>(region.h);
    const std::size_t drop = static_cast<std::size_t>(std::floor(trim * static_cast<double>(n)));
    if (2 * drop >= n)
        throw numeric_error("trim fraction leaves no samples in patch '" + region.name + "'");

    Rgb out{};
    std::vector<double> vals(n);
    for (int c = 0; c < 3; ++c) {
        std::size_t i = 0;
        for (int y = region.y; y < region.y + region.h; ++y)
            for (int x = region.x; x < region.x + region.w; ++x) vals[i++] = img.at(x, y, c);
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (std::size_t k = drop; k < n - drop; ++k) sum += vals[k];
        out[static_cast<std::size_t>(c)] = sum / static_cast<double>(n - 2 * drop);
    }
    return out;
}

/// Trimmed-mean color of every layout patch, keyed by patch name.
inline std::map<std::string, Rgb> sample_patches(const LinearImage& img, const ChartLayout& layout,
                                                 double trim = 0.1) {
    layout.validate_for(img);
    std::map<std::string, Rgb> out;
    for (const auto& p : layout.patches) out[p.name] = sample_patch(img, p, trim);
    return out;
}

}  // namespace uwcc
