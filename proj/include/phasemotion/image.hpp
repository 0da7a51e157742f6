#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"

namespace phasemotion {

// Row-major single-channel image of doubles. Luminance images produced by the
// I/O and conversion routines stay in [0,1]; derived quantities (phases,
// differences, filter responses) use the same container with free range.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw dimension_error("GrayImage: non-positive dimensions");
        data.assign(static_cast<size_t>(w) * h, fill);
    }
    GrayImage(int w, int h, std::vector<double> values) : width(w), height(h), data(std::move(values)) {
        if (w <= 0 || h <= 0) throw dimension_error("GrayImage: non-positive dimensions");
        if (data.size() != static_cast<size_t>(w) * h)
            throw dimension_error("GrayImage: data length does not match width*height");
    }

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

// Interleaved 8-bit RGB.
struct RgbImage8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // R,G,B per pixel

    RgbImage8() = default;
    RgbImage8(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {
        if (w <= 0 || h <= 0) throw dimension_error("RgbImage8: non-positive dimensions");
    }
};

struct FrameSequence {
    std::vector<GrayImage> frames;
    double frame_rate = 0.0;  // metadata only

    void validate() const {
        for (size_t i = 1; i < frames.size(); ++i) {
            if (!frames[i].same_shape(frames[0]))
                throw sequence_error("FrameSequence: frame " + std::to_string(i) +
                                     " has different dimensions than frame 0");
        }
    }
};

// BT.601 luma, output clamped to [0,1].
inline GrayImage to_grayscale(const RgbImage8& rgb) {
    if (rgb.data.size() != static_cast<size_t>(rgb.width) * rgb.height * 3)
        throw dimension_error("to_grayscale: channel buffer does not match dimensions");
    GrayImage out(rgb.width, rgb.height);
    for (size_t i = 0; i < out.size(); ++i) {
        const double r = rgb.data[3 * i + 0];
        const double g = rgb.data[3 * i + 1];
        const double b = rgb.data[3 * i + 2];
        const double y = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
        out.data[i] = std::clamp(y, 0.0, 1.0);
    }
    return out;
}

// Bilinear resize with half-pixel-center coordinates. Sampling positions are
// clamped at the borders; outputs are clamped to [0,1].
inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1) throw dimension_error("resize_bilinear: target size below 1x1");
    GrayImage out(new_w, new_h);
    const double sx = static_cast<double>(img.width) / new_w;
    const double sy = static_cast<double>(img.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
            out.at(x, y) = std::clamp(top * (1.0 - wy) + bot * wy, 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace phasemotion
