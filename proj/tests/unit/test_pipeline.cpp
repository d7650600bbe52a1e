#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenes.hpp"
#include "tissueseg/metrics.hpp"
#include "tissueseg/pipeline.hpp"

using namespace tissueseg;

namespace {

std::size_t pen_pixels_in(const TissueMask& m, const LabelRaster& labels) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i) n += m.bits()[i] && labels.labels()[i] == Label::pen;
    return n;
}

void expect_no_green_dominant_tissue(const RgbImage& img, const TissueMask& m) {
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            const Rgb c = img.at(x, y);
            if (c.g >= std::min(c.r, c.b)) {
                ASSERT_FALSE(m.at(x, y)) << x << "," << y;
            }
        }
    }
}

} // namespace

TEST(SegmentHe, CleanSlideMatchesTruth) {
    const auto r = synth::generate(scenes::clean());
    const auto seg = segment_he(r.image);
    EXPECT_GE(dice(seg.mask, r.truth), 0.95);
    EXPECT_EQ(seg.mask.method(), Method::he_representation);
    EXPECT_EQ(seg.report.tissue_pixel_count, seg.mask.count());
    EXPECT_EQ(seg.report.total_pixels, r.image.pixel_count());
    EXPECT_DOUBLE_EQ(seg.report.tissue_fraction,
                     static_cast<double>(seg.mask.count()) / static_cast<double>(r.image.pixel_count()));
    expect_no_green_dominant_tissue(r.image, seg.mask);
}

TEST(SegmentHe, EqualsComposedOperations) {
    const auto r = synth::generate(scenes::with_pen("blue"));
    const auto field = tissue_representation(r.image);
    const auto expected = apply_threshold(field, otsu_threshold(build_histogram(field)), Method::he_representation);
    EXPECT_TRUE(segment_he(r.image).mask.same_bits(expected));
}

TEST(SegmentHe, RejectsNonPinkPens) {
    for (const char* colour : {"blue", "green", "orange", "black", "red"}) {
        const auto r = synth::generate(scenes::with_pen(colour));
        const auto seg = segment_he(r.image);
        EXPECT_EQ(pen_pixels_in(seg.mask, r.labels), 0u) << colour;
        EXPECT_GE(dice(seg.mask, r.truth), 0.95) << colour;
        expect_no_green_dominant_tissue(r.image, seg.mask);
    }
}

TEST(SegmentHe, PinkPenLeaksIntoMask) {
    const auto r = synth::generate(scenes::with_pen("pink"));
    const auto seg = segment_he(r.image);
    EXPECT_GT(pen_pixels_in(seg.mask, r.labels), 0u);
    EXPECT_FALSE(evaluate(seg.mask, r.labels).criteria.all_artefacts_rejected);
}

TEST(SegmentHe, BlankSlideIsDegenerate) {
    const auto seg = segment_he(RgbImage(1, 1, Rgb{255, 255, 255}));
    EXPECT_TRUE(seg.report.degenerate);
    EXPECT_EQ(seg.mask.count(), 0u);
}

TEST(SegmentHe, UniformStainIsDegenerateNotAllTissue) {
    // One occupied bin (T well above zero everywhere): no split exists.
    const auto seg = segment_he(RgbImage(20, 10, Rgb{220, 120, 200}));
    EXPECT_TRUE(seg.report.degenerate);
    EXPECT_EQ(seg.mask.count(), 0u);
}

TEST(SegmentHe, ThreadCountDoesNotChangeMask) {
    const auto r = synth::generate(scenes::with_pen("green", 333, 251));
    EXPECT_TRUE(segment_he(r.image, {1}).mask.same_bits(segment_he(r.image, {4}).mask));
}

TEST(SegmentLuminance, CleanSlideMatchesTruth) {
    const auto r = synth::generate(scenes::clean());
    const auto seg = segment_luminance(r.image);
    EXPECT_GE(dice(seg.mask, r.truth), 0.9);
    EXPECT_EQ(seg.mask.method(), Method::luminance_baseline);
}

TEST(SegmentLuminance, DarkPenCountsAsTissue) {
    for (const char* colour : {"black", "blue", "green"}) {
        const auto r = synth::generate(scenes::with_pen(colour));
        EXPECT_GT(pen_pixels_in(segment_luminance(r.image).mask, r.labels), 0u) << colour;
    }
}

TEST(SegmentLuminance, DominantArtefactHidesTissue) {
    const auto r = synth::generate(scenes::dominated());
    const auto lum = evaluate(segment_luminance(r.image).mask, r.labels);
    EXPECT_LT(lum.comparison.tissue_recall, 0.5);
    const auto he = evaluate(segment_he(r.image).mask, r.labels);
    EXPECT_TRUE(he.criteria.success);
}

TEST(TileGrid, PartitionsRaster) {
    for (auto [w, h, t] : {std::tuple{1000, 700, 512}, {512, 512, 512}, {1, 1, 1}, {37, 300, 16}}) {
        const auto grid = make_tile_grid(w, h, t);
        std::vector<int> cover(static_cast<std::size_t>(w * h), 0);
        for (const Rect& r : grid.tiles) {
            ASSERT_LE(r.x + r.w, static_cast<std::size_t>(w));
            ASSERT_LE(r.y + r.h, static_cast<std::size_t>(h));
            for (std::size_t y = r.y; y < r.y + r.h; ++y) {
                for (std::size_t x = r.x; x < r.x + r.w; ++x) ++cover[y * w + x];
            }
        }
        for (int c : cover) ASSERT_EQ(c, 1);
    }
}

TEST(TileGrid, RejectsNonPowerOfTwo) {
    EXPECT_THROW(make_tile_grid(100, 100, 300), ValidationError);
    EXPECT_THROW(make_tile_grid(100, 100, 0), ValidationError);
}

TEST(SegmentTiled, LargeSlideMatchesInMemory) {
    auto scene = scenes::with_pen("orange", 2048, 2048);
    const auto r = synth::generate(scene);
    ImageTileSource src(r.image);
    const auto tiled = segment_he_tiled(src, make_tile_grid(2048, 2048, 512));
    const auto whole = segment_he(r.image);
    EXPECT_TRUE(tiled.mask.same_bits(whole.mask));
    EXPECT_EQ(tiled.report.gamma, whole.report.gamma);
    EXPECT_EQ(tiled.report.bin_index, whole.report.bin_index);
}

TEST(SegmentTiled, SingleTileGrid) {
    const auto r = synth::generate(scenes::clean(300, 200));
    ImageTileSource src(r.image);
    EXPECT_TRUE(segment_he_tiled(src, make_tile_grid(300, 200, 512)).mask.same_bits(segment_he(r.image).mask));
}

TEST(SegmentTiled, NonDivisibleDimensions) {
    const auto r = synth::generate(scenes::with_pen("black", 1000, 700));
    ImageTileSource src(r.image);
    for (std::size_t t : {512u, 128u, 64u}) {
        EXPECT_TRUE(segment_he_tiled(src, make_tile_grid(1000, 700, t), {3}).mask.same_bits(segment_he(r.image).mask))
            << t;
    }
}

TEST(SegmentTiled, LuminanceMatchesInMemory) {
    const auto r = synth::generate(scenes::with_pen("red", 390, 270));
    ImageTileSource src(r.image);
    EXPECT_TRUE(segment_tiled(src, make_tile_grid(390, 270, 64), Method::luminance_baseline)
                    .mask.same_bits(segment_luminance(r.image).mask));
}

TEST(SegmentTiled, RandomImagesMatchInMemory) {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 10; ++k) {
        const std::size_t w = 1 + rng() % 300, h = 1 + rng() % 300;
        const auto img = oracle::random_image(rng, w, h);
        ImageTileSource src(img);
        const std::size_t t = std::size_t{1} << (rng() % 9);
        ASSERT_TRUE(segment_he_tiled(src, make_tile_grid(w, h, t)).mask.same_bits(segment_he(img).mask));
    }
}

namespace {

struct FailingSource {
    std::size_t width() const { return 1024; }
    std::size_t height() const { return 1024; }
    RgbImage read(const Rect& r) const {
        if (r.x == 512 && r.y == 512) throw std::runtime_error("disk read failed");
        return RgbImage(r.w, r.h, Rgb{240, 240, 240});
    }
};

struct WrongSizeSource {
    std::size_t width() const { return 64; }
    std::size_t height() const { return 64; }
    RgbImage read(const Rect&) const { return RgbImage(3, 3); }
};

} // namespace

TEST(SegmentTiled, ReaderFailureCarriesTileCoordinates) {
    FailingSource src;
    try {
        segment_he_tiled(src, make_tile_grid(1024, 1024, 512));
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("x=512"), std::string::npos) << msg;
        EXPECT_NE(msg.find("y=512"), std::string::npos) << msg;
        EXPECT_NE(msg.find("disk read failed"), std::string::npos) << msg;
    }
}

TEST(SegmentTiled, WrongTileShapeIsIoError) {
    WrongSizeSource src;
    EXPECT_THROW(segment_he_tiled(src, make_tile_grid(64, 64, 32)), IoError);
}

TEST(SegmentTiled, GridMustMatchSource) {
    const RgbImage img(10, 10);
    ImageTileSource src(img);
    EXPECT_THROW(segment_he_tiled(src, make_tile_grid(11, 10, 8)), DimensionError);
}

TEST(CubeAnalysis, CoarseLatticeHitsMagentaCorner) {
    const auto c = cube_analysis(255);
    EXPECT_EQ(c.axis_points, 2u);
    EXPECT_EQ(c.total_points, 8u);
    EXPECT_EQ(c.count_nonzero, 1u);
    EXPECT_EQ(c.argmax, (Rgb{255, 0, 255}));
    EXPECT_EQ(c.max_value, 1.0f);
}

TEST(CubeAnalysis, StrideLatticeMatchesCount) {
    // On the lattice {0, s, ..., k*s}, T > 0 iff r > g and b > g, so the
    // count is sum over g-levels of (levels above g)^2.
    for (std::size_t step : {5u, 17u, 51u, 85u}) {
        const std::uint64_t n = 255 / step;
        EXPECT_EQ(cube_analysis(step).count_nonzero, n * (n + 1) * (2 * n + 1) / 6) << step;
    }
}

TEST(CubeAnalysis, FullCubeMatchesClosedForm) {
    const auto c = cube_analysis(1);
    EXPECT_EQ(c.total_points, 16777216u);
    EXPECT_EQ(c.count_nonzero, oracle::cube_positive_count());
    EXPECT_EQ(c.count_nonzero, 5559680u);
    EXPECT_DOUBLE_EQ(c.fraction, 5559680.0 / 16777216.0);
}

TEST(CubeAnalysis, StepZeroThrows) { EXPECT_THROW(cube_analysis(0), ValidationError); }
