#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "uwcc/errors.hpp"

namespace uwcc {

using Rgb = std::array<double, 3>;

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// H x W x 3 image in linear RGB, values in [0,1].
struct LinearImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major, interleaved RGB

    static LinearImage create(int w, int h, Rgb fill = {0.0, 0.0, 0.0}) {
        if (w <= 0 || h <= 0) throw validation_error("image dimensions must be positive");
        LinearImage img;
        img.width = w;
        img.height = h;
        img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = clamp01(fill[static_cast<std::size_t>(c)]);
        return img;
    }

    double& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    Rgb pixel(int x, int y) const { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }
    void set_pixel(int x, int y, const Rgb& v) {
        for (int c = 0; c < 3; ++c) at(x, y, c) = clamp01(v[static_cast<std::size_t>(c)]);
    }
    bool empty() const { return width <= 0 || height <= 0; }
};

/// 8-bit interleaved RGB image as stored in PNG/JPEG files.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    static Image8 create(int w, int h) {
        if (w <= 0 || h <= 0) throw validation_error("image dimensions must be positive");
        Image8 img;
        img.width = w;
        img.height = h;
        img.pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
        return img;
    }

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

// ---- sRGB transfer function -------------------------------------------------

/// Decode one 8-bit sRGB code value to linear light.
inline double srgb_decode_value(std::uint8_t code) {
    double s = code / 255.0;
    return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

/// Encode linear light to the nearest 8-bit sRGB code value.
inline std::uint8_t srgb_encode_value(double linear) {
    double l = clamp01(linear);
    double s = l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
    long code = std::lround(s * 255.0);
    return static_cast<std::uint8_t>(code < 0 ? 0 : (code > 255 ? 255 : code));
}

namespace detail {
inline const std::array<double, 256>& srgb_decode_lut() {
    static const std::array<double, 256> lut = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) t[static_cast<std::size_t>(i)] = srgb_decode_value(static_cast<std::uint8_t>(i));
        return t;
    }();
    return lut;
}
}  // namespace detail

/// 8-bit image to linear floating point. With `assume_linear` the pixel values
/// are taken as already linear (code/255), skipping the transfer function.
inline LinearImage decode_image(const Image8& img, bool assume_linear = false) {
    if (img.width <= 0 || img.height <= 0) throw validation_error("cannot decode an empty image");
    LinearImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(img.pixels.size());
    const auto& lut = detail::srgb_decode_lut();
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = assume_linear ? img.pixels[i] / 255.0 : lut[img.pixels[i]];
    return out;
}

/// Linear floating point to 8-bit. Inverse of decode_image for all code values.
inline Image8 encode_image(const LinearImage& img, bool assume_linear = false) {
    if (img.empty()) throw validation_error("cannot encode an empty image");
    Image8 out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        if (assume_linear) {
            long code = std::lround(clamp01(img.pixels[i]) * 255.0);
            out.pixels[i] = static_cast<std::uint8_t>(code);
        } else {
            out.pixels[i] = srgb_encode_value(img.pixels[i]);
        }
    }
    return out;
}

// ---- range fields -----------------------------------------------------------

/// Camera-to-object range: either one scalar for the whole frame or a
/// per-pixel map matching the image dimensions.
class RangeField {
public:
    static RangeField uniform(double z) {
        RangeField f;
        f.scalar_ = z;
        return f;
    }
    static RangeField per_pixel(int width, int height, std::vector<double> values) {
        if (width <= 0 || height <= 0 ||
            values.size() != static_cast<std::size_t>(width) * height)
            throw validation_error("range map dimensions do not match value count");
        RangeField f;
        f.width_ = width;
        f.height_ = height;
        f.map_ = std::move(values);
        return f;
    }

    bool is_scalar() const { return map_.empty(); }
    double scalar() const { return scalar_; }
    int width() const { return width_; }
    int height() const { return height_; }

    double at(int x, int y) const {
        return is_scalar() ? scalar_ : map_[static_cast<std::size_t>(y) * width_ + x];
    }

    /// Ranges must be positive everywhere and per-pixel maps must match the
    /// image dimensions.
    void validate_for(const LinearImage& img) const {
        if (is_scalar()) {
            if (!(scalar_ > 0.0)) throw validation_error("range must be positive");
            return;
        }
        if (width_ != img.width || height_ != img.height)
            throw validation_error("range map dimensions do not match image");
        for (double z : map_)
            if (!(z > 0.0)) throw validation_error("range map contains a non-positive range");
    }

private:
    double scalar_ = 0.0;
    int width_ = 0;
    int height_ = 0;
    std::vector<double> map_;
};

}  // namespace uwcc
