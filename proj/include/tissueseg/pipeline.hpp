#pragma once

#include <chrono>
#include <concepts>
#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include "tissueseg/image.hpp"
#include "tissueseg/parallel.hpp"
#include "tissueseg/pixel_math.hpp"
#include "tissueseg/thresholding.hpp"

namespace tissueseg {

struct SegmentationReport {
    Method method = Method::he_representation;
    double gamma = 0.0;
    std::size_t bin_index = 0;
    double variance = 0.0;
    bool degenerate = false;
    std::size_t tissue_pixel_count = 0;
    std::size_t total_pixels = 0;
    double tissue_fraction = 0.0;
    double elapsed_ms = 0.0;
};

struct Segmentation {
    TissueMask mask;
    SegmentationReport report;
};

struct SegmentOptions {
    unsigned threads = default_thread_count();
};

/// Scalar representation a method thresholds: T for he, L for luminance.
inline ScalarField representation(const RgbImage& img, Method method, unsigned threads = 1) {
    return method == Method::he_representation ? tissue_representation(img, threads)
                                               : luminance(img, threads);
}

inline void representation_row(std::span<const std::uint8_t> rgb, Method method, std::span<float> out) {
    if (method == Method::he_representation) {
        tissue_row(rgb, out);
    } else {
        luminance_row(rgb, out);
    }
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

inline SegmentationReport make_report(Method method, const Threshold& thr, const TissueMask& mask,
                                      Clock::time_point start) {
    SegmentationReport rep;
    rep.method = method;
    rep.gamma = thr.gamma;
    rep.bin_index = thr.bin_index;
    rep.variance = thr.variance;
    rep.degenerate = thr.degenerate;
    rep.tissue_pixel_count = mask.count();
    rep.total_pixels = mask.size();
    rep.tissue_fraction = static_cast<double>(rep.tissue_pixel_count) / static_cast<double>(rep.total_pixels);
    rep.elapsed_ms = ms_since(start);
    return rep;
}

} // namespace detail

/// Whole-image segmentation: histogram the representation, pick the Otsu
/// threshold, keep pixels on the tissue side of it. A degenerate histogram
/// (a single occupied bin) yields an empty mask.
inline Segmentation segment(const RgbImage& img, Method method, const SegmentOptions& opts = {}) {
    const auto start = detail::Clock::now();
    const ScalarField field = representation(img, method, opts.threads);
    const Threshold thr = otsu_threshold(build_histogram(field, opts.threads));
    TissueMask mask = thr.degenerate ? TissueMask(img.width(), img.height(), method, thr.gamma)
                                     : apply_threshold(field, thr, method);
    auto rep = detail::make_report(method, thr, mask, start);
    return {std::move(mask), rep};
}

inline Segmentation segment_he(const RgbImage& img, const SegmentOptions& opts = {}) {
    return segment(img, Method::he_representation, opts);
}

inline Segmentation segment_luminance(const RgbImage& img, const SegmentOptions& opts = {}) {
    return segment(img, Method::luminance_baseline, opts);
}

// ---------------------------------------------------------------------------
// Tiled streaming

inline constexpr std::size_t kDefaultTileSize = 512;

struct TileGrid {
    std::size_t tile_size = kDefaultTileSize;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rect> tiles;  // row-major
};

inline bool is_power_of_two(std::size_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

inline TileGrid make_tile_grid(std::size_t width, std::size_t height, std::size_t tile_size = kDefaultTileSize) {
    detail::require_shape(width, height, "TileGrid");
    if (!is_power_of_two(tile_size)) {
        throw ValidationError("TileGrid: tile size " + std::to_string(tile_size) + " is not a power of two");
    }
    TileGrid grid{tile_size, width, height, {}};
    for (std::size_t y = 0; y < height; y += tile_size) {
        for (std::size_t x = 0; x < width; x += tile_size) {
            grid.tiles.push_back({x, y, std::min(tile_size, width - x), std::min(tile_size, height - y)});
        }
    }
    return grid;
}

/// A tile source returns the RGB sub-raster for any rectangle of its image.
/// The tiled pipeline reads every tile twice, once per pass, always in the
/// grid's row-major order, from a single thread.
template <typename S>
concept TileSource = requires(S& s, const Rect& r) {
    { s.width() } -> std::convertible_to<std::size_t>;
    { s.height() } -> std::convertible_to<std::size_t>;
    { s.read(r) } -> std::same_as<RgbImage>;
};

/// Tile source over an image already in memory.
class ImageTileSource {
public:
    explicit ImageTileSource(const RgbImage& img) : img_(&img) {}
    std::size_t width() const noexcept { return img_->width(); }
    std::size_t height() const noexcept { return img_->height(); }
    RgbImage read(const Rect& r) const { return img_->crop(r); }

private:
    const RgbImage* img_;
};

namespace detail {

template <TileSource S>
RgbImage read_tile(S& source, const Rect& r) {
    RgbImage tile;
    try {
        tile = source.read(r);
    } catch (const std::exception& e) {
        throw IoError("tile " + to_string(r) + ": " + e.what());
    }
    if (tile.width() != r.w || tile.height() != r.h) {
        throw IoError("tile " + to_string(r) + ": source returned " + std::to_string(tile.width()) + "x" +
                      std::to_string(tile.height()));
    }
    return tile;
}

// Reads tiles [first, first + batch) sequentially, then runs `work(index,
// tile)` over the batch concurrently. Batch size bounds resident tiles.
template <TileSource S, typename Work>
void for_each_tile(S& source, const TileGrid& grid, unsigned threads, Work&& work) {
    const std::size_t batch = std::max<std::size_t>(threads, 1);
    std::vector<RgbImage> tiles;
    for (std::size_t first = 0; first < grid.tiles.size(); first += batch) {
        const std::size_t n = std::min(batch, grid.tiles.size() - first);
        tiles.clear();
        for (std::size_t i = 0; i < n; ++i) tiles.push_back(read_tile(source, grid.tiles[first + i]));
        parallel_chunks(n, threads, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) work(first + i, tiles[i]);
        });
    }
}

} // namespace detail

/// Two-pass constant-memory segmentation. Pass 1 accumulates one histogram
/// per tile and merges them; pass 2 re-reads each tile and writes its mask
/// bits. The result is bit-identical to segment() on the assembled image.
template <TileSource S>
Segmentation segment_tiled(S& source, const TileGrid& grid, Method method, const SegmentOptions& opts = {}) {
    const auto start = detail::Clock::now();
    if (grid.width != source.width() || grid.height != source.height()) {
        throw DimensionError("segment_tiled: grid " + std::to_string(grid.width) + "x" +
                             std::to_string(grid.height) + " does not match source " +
                             std::to_string(source.width()) + "x" + std::to_string(source.height()));
    }

    std::vector<Histogram256> per_tile(grid.tiles.size());
    detail::for_each_tile(source, grid, opts.threads, [&](std::size_t i, const RgbImage& tile) {
        std::vector<float> values(tile.width());
        for (std::size_t y = 0; y < tile.height(); ++y) {
            representation_row(tile.row(y), method, values);
            per_tile[i].add(values);
        }
    });
    Histogram256 hist;
    for (const auto& h : per_tile) hist = merge_histograms(hist, h);
    const Threshold thr = otsu_threshold(hist);

    TissueMask mask(grid.width, grid.height, method, thr.gamma);
    if (!thr.degenerate) {
        auto bits = mask.bits();
        detail::for_each_tile(source, grid, opts.threads, [&](std::size_t i, const RgbImage& tile) {
            const Rect& r = grid.tiles[i];
            std::vector<float> values(tile.width());
            for (std::size_t y = 0; y < tile.height(); ++y) {
                representation_row(tile.row(y), method, values);
                threshold_row(values, thr.gamma, method, bits.subspan((r.y + y) * grid.width + r.x, r.w));
            }
        });
    }
    auto rep = detail::make_report(method, thr, mask, start);
    return {std::move(mask), rep};
}

template <TileSource S>
Segmentation segment_he_tiled(S& source, const TileGrid& grid, const SegmentOptions& opts = {}) {
    return segment_tiled(source, grid, Method::he_representation, opts);
}

// ---------------------------------------------------------------------------
// Colour cube

struct CubeAnalysis {
    std::size_t step = 1;
    std::size_t axis_points = 0;
    std::uint64_t total_points = 0;
    std::uint64_t count_nonzero = 0;
    double fraction = 0.0;
    float max_value = 0.0f;
    Rgb argmax{};
};

/// Counts points of the lattice {0, step, 2*step, ...}^3 (per axis, values
/// <= 255) whose tissue representation is positive. step = 1 sweeps all
/// 2^24 colours.
inline CubeAnalysis cube_analysis(std::size_t step) {
    if (step == 0) throw ValidationError("cube_analysis: step must be >= 1");
    CubeAnalysis out;
    out.step = step;
    out.axis_points = 255 / step + 1;
    out.total_points = static_cast<std::uint64_t>(out.axis_points) * out.axis_points * out.axis_points;
    for (std::size_t r = 0; r <= 255; r += step) {
        for (std::size_t g = 0; g <= 255; g += step) {
            for (std::size_t b = 0; b <= 255; b += step) {
                const Rgb c{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
                const float t = tissue_value(c);
                if (t > 0.0f) ++out.count_nonzero;
                if (t > out.max_value) {
                    out.max_value = t;
                    out.argmax = c;
                }
            }
        }
    }
    out.fraction = static_cast<double>(out.count_nonzero) / static_cast<double>(out.total_points);
    return out;
}

} // namespace tissueseg
