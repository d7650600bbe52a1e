#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tissueseg/errors.hpp"

namespace tissueseg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Axis-aligned pixel rectangle, half-open on the far edges.
struct Rect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t w = 0;
    std::size_t h = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

inline std::string to_string(const Rect& r) {
    return "(x=" + std::to_string(r.x) + ", y=" + std::to_string(r.y) + ", w=" + std::to_string(r.w) +
           ", h=" + std::to_string(r.h) + ")";
}

namespace detail {

inline void require_shape(std::size_t width, std::size_t height, std::string_view what) {
    if (width == 0 || height == 0) {
        throw ValidationError(std::string(what) + ": width and height must be >= 1");
    }
}

inline void require_within(const Rect& r, std::size_t width, std::size_t height, std::string_view what) {
    if (r.w == 0 || r.h == 0 || r.x + r.w > width || r.y + r.h > height) {
        throw ValidationError(std::string(what) + ": rectangle " + to_string(r) + " outside " +
                              std::to_string(width) + "x" + std::to_string(height) + " raster");
    }
}

} // namespace detail

/// 8-bit, 3-channel raster stored row-major as interleaved (r, g, b) bytes.
class RgbImage {
public:
    RgbImage() = default;

    RgbImage(std::size_t width, std::size_t height, Rgb fill = {})
        : width_(width), height_(height) {
        detail::require_shape(width, height, "RgbImage");
        data_.resize(width * height * 3);
        for (std::size_t i = 0; i < width * height; ++i) {
            data_[3 * i] = fill.r;
            data_[3 * i + 1] = fill.g;
            data_[3 * i + 2] = fill.b;
        }
    }

    RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        detail::require_shape(width, height, "RgbImage");
        if (data_.size() != width * height * 3) {
            throw DimensionError("RgbImage: data length " + std::to_string(data_.size()) + " != " +
                                 std::to_string(width * height * 3));
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return width_ * height_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const std::uint8_t> bytes() const noexcept { return data_; }
    std::span<std::uint8_t> bytes() noexcept { return data_; }

    std::span<const std::uint8_t> row(std::size_t y) const noexcept {
        return std::span<const std::uint8_t>(data_).subspan(y * width_ * 3, width_ * 3);
    }
    std::span<std::uint8_t> row(std::size_t y) noexcept {
        return std::span<std::uint8_t>(data_).subspan(y * width_ * 3, width_ * 3);
    }

    Rgb at(std::size_t x, std::size_t y) const noexcept {
        const std::size_t i = 3 * (y * width_ + x);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }

    void set(std::size_t x, std::size_t y, Rgb c) noexcept {
        const std::size_t i = 3 * (y * width_ + x);
        data_[i] = c.r;
        data_[i + 1] = c.g;
        data_[i + 2] = c.b;
    }

    RgbImage crop(const Rect& r) const {
        detail::require_within(r, width_, height_, "RgbImage::crop");
        RgbImage out(r.w, r.h);
        for (std::size_t y = 0; y < r.h; ++y) {
            auto src = row(r.y + y).subspan(r.x * 3, r.w * 3);
            std::copy(src.begin(), src.end(), out.row(y).begin());
        }
        return out;
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Row-major per-pixel reals in [0, 1].
class ScalarField {
public:
    ScalarField() = default;

    ScalarField(std::size_t width, std::size_t height, float fill = 0.0f)
        : width_(width), height_(height), values_(width * height, fill) {
        detail::require_shape(width, height, "ScalarField");
    }

    ScalarField(std::size_t width, std::size_t height, std::vector<float> values)
        : width_(width), height_(height), values_(std::move(values)) {
        detail::require_shape(width, height, "ScalarField");
        if (values_.size() != width * height) {
            throw DimensionError("ScalarField: value count " + std::to_string(values_.size()) +
                                 " != " + std::to_string(width * height));
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const float> values() const noexcept { return values_; }
    std::span<float> values() noexcept { return values_; }

    float at(std::size_t x, std::size_t y) const noexcept { return values_[y * width_ + x]; }
    float& at(std::size_t x, std::size_t y) noexcept { return values_[y * width_ + x]; }

    bool same_shape(const ScalarField& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<float> values_;
};

enum class Method {
    he_representation,
    luminance_baseline,
};

inline std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::he_representation: return "he";
    case Method::luminance_baseline: return "luminance";
    }
    return "unknown";
}

inline Method parse_method(std::string_view name) {
    if (name == "he") return Method::he_representation;
    if (name == "luminance") return Method::luminance_baseline;
    throw ValidationError("unknown method '" + std::string(name) + "' (expected he or luminance)");
}

/// Binary tissue/background raster, one byte per pixel (0 or 1).
///
/// A byte per pixel rather than packed bits lets concurrent writers fill
/// disjoint tiles without sharing words.
class TissueMask {
public:
    TissueMask() = default;

    TissueMask(std::size_t width, std::size_t height, Method method = Method::he_representation,
               double gamma = 0.0)
        : width_(width), height_(height), bits_(width * height, 0), gamma_(gamma), method_(method) {
        detail::require_shape(width, height, "TissueMask");
    }

    TissueMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits,
               Method method = Method::he_representation, double gamma = 0.0)
        : width_(width), height_(height), bits_(std::move(bits)), gamma_(gamma), method_(method) {
        detail::require_shape(width, height, "TissueMask");
        if (bits_.size() != width * height) {
            throw DimensionError("TissueMask: bit count " + std::to_string(bits_.size()) + " != " +
                                 std::to_string(width * height));
        }
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    bool at(std::size_t x, std::size_t y) const noexcept { return bits_[y * width_ + x] != 0; }
    void set(std::size_t x, std::size_t y, bool v) noexcept { bits_[y * width_ + x] = v ? 1 : 0; }

    std::size_t count() const noexcept {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    double gamma() const noexcept { return gamma_; }
    Method method() const noexcept { return method_; }
    void set_provenance(Method m, double gamma) noexcept {
        method_ = m;
        gamma_ = gamma;
    }

    bool same_shape(const TissueMask& o) const noexcept {
        return width_ == o.width_ && height_ == o.height_;
    }

    // Compares pixels only; provenance is metadata.
    bool same_bits(const TissueMask& o) const noexcept { return same_shape(o) && bits_ == o.bits_; }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> bits_;
    double gamma_ = 0.0;
    Method method_ = Method::he_representation;
};

} // namespace tissueseg
