#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tissueseg/image.hpp"
#include "tissueseg/metrics.hpp"
#include "tissueseg/pixel_math.hpp"

namespace tissueseg::synth {

// ---------------------------------------------------------------------------
// Hashing and seeded sampling. Only integer arithmetic and IEEE basic
// operations are used so the same seed renders the same bytes everywhere.

inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept { return mix64(seed ^ mix64(v)); }

template <typename... Ts>
std::uint64_t hash_of(std::uint64_t seed, Ts... vs) noexcept {
    ((seed = hash_combine(seed, static_cast<std::uint64_t>(vs))), ...);
    return seed;
}

inline double unit_from_bits(std::uint64_t b) noexcept {
    return static_cast<double>(b >> 11) * (1.0 / 9007199254740992.0);
}

// std distributions are implementation-defined, so mappings from the engine
// are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    double uniform() { return unit_from_bits(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform_int(0, static_cast<int>(v.size()) - 1))];
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Palettes

/// Purple-pink stain colours. Every entry (and every blend of two entries)
/// has r - g >= kStainMargin and b - g >= kStainMargin, so per-pixel noise
/// of +-kNoiseAmplitude cannot push a tissue pixel to T = 0.
struct HePalette {
    static constexpr int kStainMargin = 50;

    static const std::vector<Rgb>& eosin() {
        static const std::vector<Rgb> v{
            {228, 128, 196}, {230, 146, 210}, {218, 118, 188}, {224, 136, 204}, {212, 122, 182},
        };
        return v;
    }
    static const std::vector<Rgb>& haematoxylin() {
        static const std::vector<Rgb> v{
            {150, 82, 182}, {156, 90, 196}, {166, 96, 196}, {152, 78, 190},
        };
        return v;
    }
};

struct PenColour {
    std::string_view name;
    Rgb rgb;
};

/// Annotation ink colours. All but pink have T = 0; pink sits in the eosin
/// range on purpose.
struct PenPalette {
    static const std::array<PenColour, 6>& colours() {
        static const std::array<PenColour, 6> v{{
            {"black", {30, 32, 34}},
            {"blue", {35, 70, 190}},
            {"green", {40, 150, 70}},
            {"orange", {242, 150, 40}},
            {"red", {205, 40, 38}},
            {"pink", {230, 126, 200}},
        }};
        return v;
    }

    static std::optional<Rgb> find(std::string_view name) {
        for (const auto& c : colours()) {
            if (c.name == name) return c.rgb;
        }
        return std::nullopt;
    }
};

inline constexpr int kNoiseAmplitude = 5;
inline constexpr std::uint8_t kBackgroundLevel = 245;

// ---------------------------------------------------------------------------
// Scene description

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

enum class SceneCategory { clean, pen, scan_artefact };

inline std::string_view to_string(SceneCategory c) noexcept {
    switch (c) {
    case SceneCategory::clean: return "clean";
    case SceneCategory::pen: return "pen";
    case SceneCategory::scan_artefact: return "scan_artefact";
    }
    return "unknown";
}

inline SceneCategory parse_category(std::string_view s) {
    if (s == "clean") return SceneCategory::clean;
    if (s == "pen") return SceneCategory::pen;
    if (s == "scan_artefact") return SceneCategory::scan_artefact;
    throw ValidationError("unknown scene category '" + std::string(s) + "'");
}

struct TissueBlob {
    std::vector<Point> outline;  // control polygon
    int smoothing = 3;           // corner-cutting passes
    Rgb eosin{};
    Rgb haematoxylin{};
    int texture_cell = 24;  // value-noise lattice spacing in pixels
    friend bool operator==(const TissueBlob&, const TissueBlob&) = default;
};

struct PenStroke {
    std::string colour;
    std::vector<Point> points;
    int width = 6;
    friend bool operator==(const PenStroke&, const PenStroke&) = default;
};

struct BoundingBox {
    Point origin;
    int w = 0;
    int h = 0;
    int thickness = 2;
    Rgb colour{};
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct DarkBlob {
    std::vector<Point> outline;
    int smoothing = 2;
    Rgb colour{};
    friend bool operator==(const DarkBlob&, const DarkBlob&) = default;
};

/// A run of pseudo-glyphs: each glyph is a 5x7 cell pattern drawn from
/// glyph_seed, each cell `scale` pixels square, glyphs one cell apart.
struct TextCluster {
    Point origin;
    int glyphs = 6;
    int scale = 2;
    std::uint64_t glyph_seed = 0;
    Rgb colour{};
    friend bool operator==(const TextCluster&, const TextCluster&) = default;

    static constexpr int kCols = 5;
    static constexpr int kRows = 7;
    int pixel_width() const noexcept { return glyphs * (kCols + 1) * scale - scale; }
    int pixel_height() const noexcept { return kRows * scale; }
};

struct SynthScene {
    int id = 0;
    std::uint64_t seed = 0;
    int width = 256;
    int height = 256;
    SceneCategory category = SceneCategory::clean;
    bool expected_failure = false;
    Rgb background{kBackgroundLevel, kBackgroundLevel, kBackgroundLevel};
    int noise = kNoiseAmplitude;
    std::vector<TissueBlob> tissue_blobs;
    std::optional<BoundingBox> bounding_box;
    std::vector<DarkBlob> dark_blobs;
    std::vector<TextCluster> text;
    std::vector<PenStroke> pen_strokes;
    friend bool operator==(const SynthScene&, const SynthScene&) = default;
};

struct RenderedScene {
    RgbImage image;
    LabelRaster labels;
    TissueMask truth;
};

// ---------------------------------------------------------------------------
// Geometry

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Chaikin corner cutting on a closed polygon: each edge contributes its 1/4
/// and 3/4 points.
inline std::vector<Vec2> smooth_closed(const std::vector<Point>& outline, int passes) {
    std::vector<Vec2> poly;
    poly.reserve(outline.size());
    for (const auto& p : outline) poly.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    for (int k = 0; k < passes; ++k) {
        std::vector<Vec2> next;
        next.reserve(poly.size() * 2);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 a = poly[i];
            const Vec2 b = poly[(i + 1) % poly.size()];
            next.push_back({0.75 * a.x + 0.25 * b.x, 0.75 * a.y + 0.25 * b.y});
            next.push_back({0.25 * a.x + 0.75 * b.x, 0.25 * a.y + 0.75 * b.y});
        }
        poly = std::move(next);
    }
    return poly;
}

/// Calls fn(x, y) for each pixel whose centre lies inside the polygon
/// (even-odd rule).
template <typename Fn>
void fill_polygon(const std::vector<Vec2>& poly, int width, int height, Fn&& fn) {
    if (poly.size() < 3) return;
    double ymin = poly[0].y, ymax = poly[0].y;
    for (const auto& p : poly) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int y0 = std::max(0, static_cast<int>(std::floor(ymin)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(ymax)));
    std::vector<double> xs;
    for (int y = y0; y <= y1; ++y) {
        const double cy = y + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 a = poly[i];
            const Vec2 b = poly[(i + 1) % poly.size()];
            if ((a.y <= cy) != (b.y <= cy)) xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            // pixel centres x + 0.5 in [xs[i], xs[i+1])
            const int xa = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
            const int xb = std::min(width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
            for (int x = xa; x <= xb; ++x) fn(x, y);
        }
    }
}

inline double segment_distance_sq(double px, double py, Vec2 a, Vec2 b) noexcept {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
    return ex * ex + ey * ey;
}

/// Calls fn(x, y) for each pixel whose centre is within width/2 of the
/// polyline. A pixel may be visited more than once.
template <typename Fn>
void stroke_polyline(const std::vector<Point>& pts, int stroke_width, int width, int height, Fn&& fn) {
    const double r = stroke_width / 2.0;
    const double r2 = r * r;
    auto visit_segment = [&](Vec2 a, Vec2 b) {
        const int xa = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
        const int xb = std::min(width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
        const int ya = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
        const int yb = std::min(height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
        for (int y = ya; y <= yb; ++y) {
            for (int x = xa; x <= xb; ++x) {
                if (segment_distance_sq(x + 0.5, y + 0.5, a, b) <= r2) fn(x, y);
            }
        }
    };
    if (pts.size() == 1) {
        const Vec2 p{static_cast<double>(pts[0].x), static_cast<double>(pts[0].y)};
        visit_segment(p, p);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        visit_segment({static_cast<double>(pts[i].x), static_cast<double>(pts[i].y)},
                      {static_cast<double>(pts[i + 1].x), static_cast<double>(pts[i + 1].y)});
    }
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::uint8_t clamp_byte(int v) noexcept { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

inline int noise_offset(std::uint64_t seed, int x, int y, int channel, int amplitude) noexcept {
    if (amplitude <= 0) return 0;
    const auto span = static_cast<std::uint64_t>(2 * amplitude + 1);
    return static_cast<int>(hash_of(seed, 0x6e6f697365ULL, x, y, channel) % span) - amplitude;
}

inline Rgb add_noise(Rgb c, std::uint64_t seed, int x, int y, int amplitude) noexcept {
    return {clamp_byte(c.r + noise_offset(seed, x, y, 0, amplitude)),
            clamp_byte(c.g + noise_offset(seed, x, y, 1, amplitude)),
            clamp_byte(c.b + noise_offset(seed, x, y, 2, amplitude))};
}

inline double smoothstep(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

// Bilinear value noise in [0, 1] on a lattice of `cell`-pixel spacing.
inline double value_noise(std::uint64_t seed, int x, int y, int cell) noexcept {
    const int cx = x / cell, cy = y / cell;
    const double fx = smoothstep(static_cast<double>(x % cell) / cell);
    const double fy = smoothstep(static_cast<double>(y % cell) / cell);
    auto lattice = [&](int i, int j) { return unit_from_bits(hash_of(seed, 0x6c617474ULL, i, j)); };
    const double a = lattice(cx, cy), b = lattice(cx + 1, cy);
    const double c = lattice(cx, cy + 1), d = lattice(cx + 1, cy + 1);
    const double top = a + (b - a) * fx;
    const double bottom = c + (d - c) * fx;
    return top + (bottom - top) * fy;
}

inline std::uint8_t lerp_byte(std::uint8_t a, std::uint8_t b, int w256) noexcept {
    return static_cast<std::uint8_t>((a * (256 - w256) + b * w256 + 128) >> 8);
}

inline Rgb stain_colour(const TissueBlob& blob, std::uint64_t seed, int x, int y) noexcept {
    const double s = value_noise(seed, x, y, std::max(1, blob.texture_cell));
    // Eosin-dominant with haematoxylin-rich patches.
    const int w = static_cast<int>(std::floor(s * s * 256.0));
    const int w256 = std::clamp(w, 0, 256);
    return {lerp_byte(blob.eosin.r, blob.haematoxylin.r, w256), lerp_byte(blob.eosin.g, blob.haematoxylin.g, w256),
            lerp_byte(blob.eosin.b, blob.haematoxylin.b, w256)};
}

inline bool glyph_cell_on(std::uint64_t glyph_seed, int glyph, int col, int row) noexcept {
    return (hash_of(glyph_seed, 0x676c79ULL, glyph, col, row) & 3u) != 0;
}

inline void require(bool ok, const SynthScene& s, std::string_view what) {
    if (!ok) throw ValidationError("scene " + std::to_string(s.id) + ": " + std::string(what));
}

inline bool inside(const SynthScene& s, const Point& p) noexcept {
    return p.x >= 0 && p.y >= 0 && p.x <= s.width && p.y <= s.height;
}

} // namespace detail

/// Rejects geometry outside the raster and parameters with no meaning.
inline void validate(const SynthScene& s) {
    using detail::require;
    require(s.width >= 1 && s.height >= 1, s, "width and height must be >= 1");
    require(s.noise >= 0 && s.noise <= 32, s, "noise amplitude must be in [0, 32]");
    for (const auto& b : s.tissue_blobs) {
        require(b.outline.size() >= 3, s, "tissue blob needs >= 3 outline points");
        require(b.smoothing >= 0 && b.smoothing <= 8, s, "tissue blob smoothing must be in [0, 8]");
        require(b.texture_cell >= 1, s, "tissue blob texture_cell must be >= 1");
        for (const auto& p : b.outline) require(detail::inside(s, p), s, "tissue blob point outside raster");
    }
    for (const auto& b : s.dark_blobs) {
        require(b.outline.size() >= 3, s, "dark blob needs >= 3 outline points");
        require(b.smoothing >= 0 && b.smoothing <= 8, s, "dark blob smoothing must be in [0, 8]");
        for (const auto& p : b.outline) require(detail::inside(s, p), s, "dark blob point outside raster");
    }
    for (const auto& t : s.text) {
        require(t.glyphs >= 1 && t.scale >= 1, s, "text cluster needs glyphs >= 1 and scale >= 1");
        require(detail::inside(s, t.origin) && t.origin.x + t.pixel_width() <= s.width &&
                    t.origin.y + t.pixel_height() <= s.height,
                s, "text cluster outside raster");
    }
    if (s.bounding_box) {
        const auto& bb = *s.bounding_box;
        require(bb.w >= 1 && bb.h >= 1 && bb.thickness >= 1, s, "bounding box needs positive size and thickness");
        require(detail::inside(s, bb.origin) && bb.origin.x + bb.w <= s.width && bb.origin.y + bb.h <= s.height, s,
                "bounding box outside raster");
    }
    for (const auto& p : s.pen_strokes) {
        require(PenPalette::find(p.colour).has_value(), s, "unknown pen colour '" + p.colour + "'");
        require(!p.points.empty(), s, "pen stroke needs >= 1 point");
        require(p.width >= 1, s, "pen stroke width must be >= 1");
        for (const auto& q : p.points) require(detail::inside(s, q), s, "pen stroke point outside raster");
    }
}

/// Renders a scene. Layers, bottom to top: background, tissue, dark blobs,
/// text, bounding box, pen. Later layers relabel the pixels they cover.
/// Edges are hard (no antialiasing) so labels are exact.
inline RenderedScene generate(const SynthScene& s) {
    validate(s);
    const auto w = static_cast<std::size_t>(s.width);
    const auto h = static_cast<std::size_t>(s.height);
    RgbImage img(w, h);
    LabelRaster labels(w, h);

    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) img.set(x, y, detail::add_noise(s.background, s.seed, x, y, s.noise));
    }

    for (std::size_t i = 0; i < s.tissue_blobs.size(); ++i) {
        const auto& blob = s.tissue_blobs[i];
        const std::uint64_t tex_seed = hash_of(s.seed, 0x74657874ULL, i);
        fill_polygon(smooth_closed(blob.outline, blob.smoothing), s.width, s.height, [&](int x, int y) {
            img.set(x, y, detail::add_noise(detail::stain_colour(blob, tex_seed, x, y), s.seed, x, y, s.noise));
            labels.set(x, y, Label::tissue);
        });
    }

    for (const auto& blob : s.dark_blobs) {
        fill_polygon(smooth_closed(blob.outline, blob.smoothing), s.width, s.height, [&](int x, int y) {
            img.set(x, y, blob.colour);
            labels.set(x, y, Label::scan_artefact);
        });
    }

    for (const auto& t : s.text) {
        for (int g = 0; g < t.glyphs; ++g) {
            const int gx = t.origin.x + g * (TextCluster::kCols + 1) * t.scale;
            for (int row = 0; row < TextCluster::kRows; ++row) {
                for (int col = 0; col < TextCluster::kCols; ++col) {
                    if (!detail::glyph_cell_on(t.glyph_seed, g, col, row)) continue;
                    for (int dy = 0; dy < t.scale; ++dy) {
                        for (int dx = 0; dx < t.scale; ++dx) {
                            const int x = gx + col * t.scale + dx;
                            const int y = t.origin.y + row * t.scale + dy;
                            img.set(x, y, t.colour);
                            labels.set(x, y, Label::scan_artefact);
                        }
                    }
                }
            }
        }
    }

    if (s.bounding_box) {
        const auto& bb = *s.bounding_box;
        for (int y = bb.origin.y; y < bb.origin.y + bb.h; ++y) {
            for (int x = bb.origin.x; x < bb.origin.x + bb.w; ++x) {
                const bool edge = x < bb.origin.x + bb.thickness || x >= bb.origin.x + bb.w - bb.thickness ||
                                  y < bb.origin.y + bb.thickness || y >= bb.origin.y + bb.h - bb.thickness;
                if (!edge) continue;
                img.set(x, y, bb.colour);
                labels.set(x, y, Label::bounding_box);
            }
        }
    }

    for (const auto& stroke : s.pen_strokes) {
        const Rgb c = *PenPalette::find(stroke.colour);
        stroke_polyline(stroke.points, stroke.width, s.width, s.height, [&](int x, int y) {
            img.set(x, y, c);
            labels.set(x, y, Label::pen);
        });
    }

    TissueMask truth = labels.tissue_mask();
    return {std::move(img), std::move(labels), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Standard corpus

inline constexpr int kCorpusSize = 60;
inline constexpr int kPenScenes = 15;
inline constexpr int kScanScenes = 15;
inline constexpr int kCleanScenes = 30;
// Position of the pink-pen scene within the pen block.
inline constexpr int kPinkPenIndex = 6;
// Scan-artefact scenes whose dark region outweighs the background.
inline constexpr std::array<int, 2> kDominantArtefactIndices{4, 11};

namespace detail {

struct Disc {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

inline Point clamp_point(double x, double y, int w, int h) {
    return {std::clamp(static_cast<int>(std::lround(x)), 0, w), std::clamp(static_cast<int>(std::lround(y)), 0, h)};
}

inline std::vector<Point> wobbly_outline(Rng& rng, const Disc& d, int w, int h, int min_vertices, int max_vertices,
                                         double min_radius_factor) {
    const int n = rng.uniform_int(min_vertices, max_vertices);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double a = phase + 2.0 * std::numbers::pi * (k + rng.uniform(-0.25, 0.25)) / n;
        const double r = d.r * rng.uniform(min_radius_factor, 1.0);
        out.push_back(clamp_point(d.cx + r * std::cos(a), d.cy + r * std::sin(a), w, h));
    }
    return out;
}

inline std::vector<Disc> place_tissue(Rng& rng, SynthScene& s, int count, double x_min_fraction) {
    std::vector<Disc> discs;
    for (int i = 0; i < count; ++i) {
        const double r = rng.uniform(45.0, 95.0);
        const double lo_x = std::max(r + 16.0, x_min_fraction * s.width + r);
        const double hi_x = s.width - r - 16.0;
        const double cx = rng.uniform(lo_x, std::max(lo_x, hi_x));
        const double cy = rng.uniform(r + 16.0, s.height - r - 16.0);
        const Disc d{cx, cy, r};
        TissueBlob blob;
        blob.outline = wobbly_outline(rng, d, s.width, s.height, 8, 13, 0.62);
        blob.smoothing = 3;
        blob.eosin = rng.pick(HePalette::eosin());
        blob.haematoxylin = rng.pick(HePalette::haematoxylin());
        blob.texture_cell = rng.uniform_int(14, 32);
        s.tissue_blobs.push_back(std::move(blob));
        discs.push_back(d);
    }
    return discs;
}

inline PenStroke encircling_stroke(Rng& rng, const Disc& d, const SynthScene& s, std::string_view colour) {
    PenStroke p;
    p.colour = std::string(colour);
    p.width = rng.uniform_int(4, 10);
    const double start = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double sweep = rng.uniform(1.4, 1.9) * std::numbers::pi;
    const double rx = d.r * rng.uniform(1.15, 1.4);
    const double ry = d.r * rng.uniform(1.15, 1.4);
    constexpr int kSegments = 28;
    for (int k = 0; k <= kSegments; ++k) {
        const double a = start + sweep * k / kSegments;
        p.points.push_back(clamp_point(d.cx + rx * std::cos(a), d.cy + ry * std::sin(a), s.width, s.height));
    }
    return p;
}

// A line across a blob, the way a pathologist separates levels.
inline PenStroke splitting_stroke(Rng& rng, const Disc& d, const SynthScene& s, std::string_view colour) {
    PenStroke p;
    p.colour = std::string(colour);
    p.width = rng.uniform_int(4, 9);
    const double a = rng.uniform(0.0, std::numbers::pi);
    const double len = d.r * rng.uniform(1.2, 1.6);
    const double bend = rng.uniform(-0.2, 0.2) * d.r;
    p.points.push_back(clamp_point(d.cx - len * std::cos(a), d.cy - len * std::sin(a), s.width, s.height));
    p.points.push_back(clamp_point(d.cx - bend * std::sin(a), d.cy + bend * std::cos(a), s.width, s.height));
    p.points.push_back(clamp_point(d.cx + len * std::cos(a), d.cy + len * std::sin(a), s.width, s.height));
    return p;
}

inline PenStroke tick_stroke(Rng& rng, const SynthScene& s, std::string_view colour) {
    PenStroke p;
    p.colour = std::string(colour);
    p.width = rng.uniform_int(5, 10);
    const double x = rng.uniform(30.0, s.width - 60.0);
    const double y = rng.uniform(30.0, s.height - 60.0);
    p.points.push_back(clamp_point(x, y, s.width, s.height));
    p.points.push_back(clamp_point(x + 14.0, y + 18.0, s.width, s.height));
    p.points.push_back(clamp_point(x + 42.0, y - 16.0, s.width, s.height));
    return p;
}

inline std::string_view pen_colour_for(int pen_index) {
    static constexpr std::array<std::string_view, 5> cycle{"blue", "green", "orange", "black", "red"};
    if (pen_index == kPinkPenIndex) return "pink";
    const int k = pen_index < kPinkPenIndex ? pen_index : pen_index - 1;
    return cycle[static_cast<std::size_t>(k) % cycle.size()];
}

inline Rgb dark_artefact_colour(Rng& rng) {
    // grey with g >= r and g >= b, so T = 0
    const int g = rng.uniform_int(28, 70);
    return {clamp_byte(g - rng.uniform_int(0, 6)), clamp_byte(g), clamp_byte(g - rng.uniform_int(0, 6))};
}

inline void add_bounding_box(Rng& rng, SynthScene& s) {
    static const std::vector<Rgb> colours{{20, 20, 20}, {0, 150, 60}, {40, 60, 200}, {90, 92, 90}};
    BoundingBox bb;
    const int inset_x = rng.uniform_int(6, 24);
    const int inset_y = rng.uniform_int(6, 24);
    bb.origin = {inset_x, inset_y};
    bb.w = s.width - 2 * inset_x;
    bb.h = s.height - 2 * inset_y;
    bb.thickness = rng.uniform_int(2, 4);
    bb.colour = rng.pick(colours);
    s.bounding_box = bb;
}

inline void add_text(Rng& rng, SynthScene& s) {
    TextCluster t;
    t.glyphs = rng.uniform_int(4, 10);
    t.scale = rng.uniform_int(2, 3);
    t.glyph_seed = rng.next();
    const int v = rng.uniform_int(10, 40);
    t.colour = {clamp_byte(v), clamp_byte(v), clamp_byte(v)};
    t.origin = {rng.uniform_int(30, std::max(30, s.width - t.pixel_width() - 30)),
                rng.uniform_int(30, std::max(30, s.height - t.pixel_height() - 30))};
    s.text.push_back(t);
}

// Dark region covering the left part of the slide with a ragged edge.
inline void add_dominant_region(Rng& rng, SynthScene& s, double fraction) {
    DarkBlob band;
    band.smoothing = 2;
    const int v = rng.uniform_int(12, 22);
    band.colour = {clamp_byte(v), clamp_byte(v + 3), clamp_byte(v)};
    const double edge = fraction * s.width;
    band.outline.push_back({0, 0});
    constexpr int kSteps = 10;
    for (int k = 0; k <= kSteps; ++k) {
        const double y = static_cast<double>(s.height) * k / kSteps;
        band.outline.push_back(clamp_point(edge + rng.uniform(-0.04, 0.04) * s.width, y, s.width, s.height));
    }
    band.outline.push_back({0, s.height});
    s.dark_blobs.push_back(std::move(band));
}

inline SynthScene layout_scene(int id, std::uint64_t seed, SceneCategory category, int index_in_category) {
    Rng rng(seed);
    SynthScene s;
    s.id = id;
    s.seed = seed;
    s.category = category;
    s.width = rng.uniform_int(560, 820);
    s.height = rng.uniform_int(420, 620);
    s.background = {clamp_byte(kBackgroundLevel + rng.uniform_int(-2, 2)),
                    clamp_byte(kBackgroundLevel + rng.uniform_int(-2, 2)),
                    clamp_byte(kBackgroundLevel + rng.uniform_int(-2, 2))};
    s.noise = kNoiseAmplitude;

    const bool dominant = category == SceneCategory::scan_artefact &&
                          std::find(kDominantArtefactIndices.begin(), kDominantArtefactIndices.end(),
                                    index_in_category) != kDominantArtefactIndices.end();
    const double dominant_fraction = 0.5;
    if (dominant) add_dominant_region(rng, s, dominant_fraction);

    const int blobs = dominant ? rng.uniform_int(1, 2) : rng.uniform_int(1, 4);
    const auto discs = place_tissue(rng, s, blobs, dominant ? dominant_fraction + 0.1 : 0.0);

    switch (category) {
    case SceneCategory::clean: break;
    case SceneCategory::pen: {
        const auto colour = pen_colour_for(index_in_category);
        s.expected_failure = colour == "pink";
        s.pen_strokes.push_back(encircling_stroke(rng, rng.pick(discs), s, colour));
        const int extra = rng.uniform_int(0, 2);
        for (int k = 0; k < extra; ++k) {
            if (rng.uniform() < 0.5) {
                s.pen_strokes.push_back(splitting_stroke(rng, rng.pick(discs), s, colour));
            } else {
                s.pen_strokes.push_back(tick_stroke(rng, s, colour));
            }
        }
        break;
    }
    case SceneCategory::scan_artefact: {
        if (index_in_category % 2 == 0) add_bounding_box(rng, s);
        const int spots = rng.uniform_int(1, 3);
        for (int k = 0; k < spots; ++k) {
            const double r = rng.uniform(8.0, 32.0);
            const Disc d{rng.uniform(r + 4.0, s.width - r - 4.0), rng.uniform(r + 4.0, s.height - r - 4.0), r};
            DarkBlob spot;
            spot.outline = wobbly_outline(rng, d, s.width, s.height, 6, 10, 0.55);
            spot.colour = dark_artefact_colour(rng);
            s.dark_blobs.push_back(std::move(spot));
        }
        if (index_in_category % 3 == 0) add_text(rng, s);
        break;
    }
    }
    return s;
}

} // namespace detail

inline std::uint64_t scene_seed(std::uint64_t master_seed, int id) noexcept {
    return hash_of(master_seed, 0x7363656e65ULL, id);
}

inline SceneCategory standard_category(int id) noexcept {
    if (id < kPenScenes) return SceneCategory::pen;
    if (id < kPenScenes + kScanScenes) return SceneCategory::scan_artefact;
    return SceneCategory::clean;
}

/// Single scene of the standard corpus; ids 0-14 carry pen marks, 15-29
/// scanning artefacts (odd indices within the block have no bounding box),
/// 30-59 are artefact-free.
inline SynthScene standard_scene(std::uint64_t master_seed, int id) {
    if (id < 0 || id >= kCorpusSize) throw ValidationError("standard_scene: id out of range");
    const SceneCategory c = standard_category(id);
    const int index = c == SceneCategory::pen             ? id
                      : c == SceneCategory::scan_artefact ? id - kPenScenes
                                                          : id - kPenScenes - kScanScenes;
    return detail::layout_scene(id, scene_seed(master_seed, id), c, index);
}

/// 60 scenes: 15 pen, 15 scan-artefact, 30 clean. Pen colours cycle
/// blue, green, orange, black, red with one pink scene (id 6), which is
/// flagged expected_failure.
inline std::vector<SynthScene> standard_corpus(std::uint64_t master_seed) {
    std::vector<SynthScene> out;
    out.reserve(kCorpusSize);
    for (int id = 0; id < kCorpusSize; ++id) out.push_back(standard_scene(master_seed, id));
    return out;
}

} // namespace tissueseg::synth
