#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include <opencv2/imgcodecs.hpp>

#include "uwcc/errors.hpp"
#include "uwcc/image.hpp"

namespace uwcc::io {

namespace detail {
inline std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}
}  // namespace detail

/// Read an 8-bit image file (PNG or JPEG) into RGB order. Grayscale files are
/// expanded to three channels; alpha is dropped.
inline Image8 read_image8(const std::string& path) {
    const std::string ext = detail::lower_ext(path);
    if (ext != "png" && ext != "jpg" && ext != "jpeg")
        throw validation_error("unsupported image format '" + ext + "' for " + path +
                               " (PNG and JPEG only)");
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);  // forces 8-bit, 3-channel BGR
    if (m.empty()) throw validation_error("cannot read image: " + path);

    Image8 out = Image8::create(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < m.cols; ++x) {
            const std::size_t base =
                (static_cast<std::size_t>(y) * static_cast<std::size_t>(m.cols) +
                 static_cast<std::size_t>(x)) *
                3;
            out.pixels[base + 0] = row[x][2];  // BGR -> RGB
            out.pixels[base + 1] = row[x][1];
            out.pixels[base + 2] = row[x][0];
        }
    }
    return out;
}

/// Write an 8-bit RGB image as PNG (the only supported output format; JPEG
/// would re-degrade the colors this library exists to correct).
inline void write_image8(const Image8& img, const std::string& path) {
    if (img.pixels.empty() || img.width <= 0 || img.height <= 0)
        throw validation_error("cannot write an empty image: " + path);
    const std::string ext = detail::lower_ext(path);
    if (ext != "png")
        throw validation_error("output must be PNG, got '" + ext + "' for " + path);

    cv::Mat m(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::size_t base =
                (static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) +
                 static_cast<std::size_t>(x)) *
                3;
            row[x] = cv::Vec3b(img.pixels[base + 2], img.pixels[base + 1],
                               img.pixels[base + 0]);  // RGB -> BGR
        }
    }
    if (!cv::imwrite(path, m)) throw validation_error("cannot write image: " + path);
}

/// File -> linear image, honoring the assume-linear bypass for raw captures.
inline LinearImage read_linear(const std::string& path, bool assume_linear = false) {
    return decode_image(read_image8(path), assume_linear);
}

/// Linear image -> PNG file.
inline void write_linear(const LinearImage& img, const std::string& path,
                         bool assume_linear = false) {
    write_image8(encode_image(img, assume_linear), path);
}

}  // namespace uwcc::io
