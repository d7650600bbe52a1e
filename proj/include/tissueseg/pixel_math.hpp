#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>

#include "tissueseg/image.hpp"
#include "tissueseg/parallel.hpp"

namespace tissueseg {

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline float normalize_byte(std::uint8_t v) noexcept { return static_cast<float>(v) / 255.0f; }

inline float relu(float v) noexcept { return v > 0.0f ? v : 0.0f; }

/// ReLU(r - g) * ReLU(b - g) on channels scaled to [0, 1].
///
/// Zero whenever g >= r or g >= b, so greys, whites, blacks and any
/// green-dominant colour land exactly on 0. Purple-pink (stained) colours,
/// which carry more red and blue than green, are the only positive values.
inline float tissue_value(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const float rn = normalize_byte(r);
    const float gn = normalize_byte(g);
    const float bn = normalize_byte(b);
    return relu(rn - gn) * relu(bn - gn);
}

inline float tissue_value(Rgb c) noexcept { return tissue_value(c.r, c.g, c.b); }

inline float luminance_value(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const double l = kLumaR * (r / 255.0) + kLumaG * (g / 255.0) + kLumaB * (b / 255.0);
    return std::clamp(static_cast<float>(l), 0.0f, 1.0f);
}

inline float luminance_value(Rgb c) noexcept { return luminance_value(c.r, c.g, c.b); }

// Row kernels: `rgb` holds interleaved bytes, `out` one value per pixel.
inline void tissue_row(std::span<const std::uint8_t> rgb, std::span<float> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = tissue_value(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    }
}

inline void luminance_row(std::span<const std::uint8_t> rgb, std::span<float> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = luminance_value(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    }
}

namespace detail {

template <typename RowKernel>
ScalarField map_rows(const RgbImage& img, unsigned threads, RowKernel kernel) {
    ScalarField out(img.width(), img.height());
    parallel_chunks(img.height(), threads, [&](std::size_t, std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            kernel(img.row(y), out.values().subspan(y * img.width(), img.width()));
        }
    });
    return out;
}

} // namespace detail

struct NormalizedChannels {
    ScalarField r;
    ScalarField g;
    ScalarField b;
};

/// Each channel divided by 255.
inline NormalizedChannels normalize(const RgbImage& img) {
    NormalizedChannels ch{ScalarField(img.width(), img.height()), ScalarField(img.width(), img.height()),
                          ScalarField(img.width(), img.height())};
    auto src = img.bytes();
    auto r = ch.r.values();
    auto g = ch.g.values();
    auto b = ch.b.values();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        r[i] = normalize_byte(src[3 * i]);
        g[i] = normalize_byte(src[3 * i + 1]);
        b[i] = normalize_byte(src[3 * i + 2]);
    }
    return ch;
}

/// Element-wise max(a - b, 0).
inline ScalarField relu_diff(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("relu_diff: shape mismatch " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()));
    }
    ScalarField out(a.width(), a.height());
    auto av = a.values();
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = relu(av[i] - bv[i]);
    return out;
}

/// Element-wise product; both fields must share a shape.
inline ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b)) throw DimensionError("hadamard: shape mismatch");
    ScalarField out(a.width(), a.height());
    auto av = a.values();
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
    return out;
}

inline ScalarField tissue_representation(const RgbImage& img, unsigned threads = 1) {
    return detail::map_rows(img, threads, tissue_row);
}

inline ScalarField luminance(const RgbImage& img, unsigned threads = 1) {
    return detail::map_rows(img, threads, luminance_row);
}

} // namespace tissueseg
