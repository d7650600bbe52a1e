#include <fstream>
#include <random>

#include <png.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tissueseg/image_io.hpp"
#include "tissueseg/pipeline.hpp"

using namespace tissueseg;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

// Low-level libpng writer so tests can produce layouts the simplified API
// never emits (interlaced, 16-bit).
void write_png_raw(const std::filesystem::path& path, const RgbImage& img, bool interlaced, int depth) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    ASSERT_NE(f, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), depth,
                 PNG_COLOR_TYPE_RGB, interlaced ? PNG_INTERLACE_ADAM7 : PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t bpp = depth == 16 ? 6 : 3;
    std::vector<std::uint8_t> data(img.pixel_count() * bpp);
    for (std::size_t i = 0; i < img.pixel_count() * 3; ++i) {
        const auto v = img.bytes()[i];
        if (depth == 16) {
            data[2 * i] = v;
            data[2 * i + 1] = v;
        } else {
            data[i] = v;
        }
    }
    std::vector<png_bytep> rows(img.height());
    for (std::size_t y = 0; y < img.height(); ++y) rows[y] = data.data() + y * img.width() * bpp;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

} // namespace

TEST(ImageIo, PngRoundTrip) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(3);
    const auto img = oracle::random_image(rng, 37, 23);
    io::write_png(dir / "a.png", img);
    EXPECT_EQ(io::sniff_format(dir / "a.png"), io::ImageFormat::png);
    EXPECT_EQ(io::read_image(dir / "a.png"), img);
}

TEST(ImageIo, PpmRoundTrip) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(4);
    const auto img = oracle::random_image(rng, 19, 41);
    io::write_ppm(dir / "a.ppm", img);
    EXPECT_EQ(io::sniff_format(dir / "a.ppm"), io::ImageFormat::ppm);
    EXPECT_EQ(io::read_image(dir / "a.ppm"), img);
}

TEST(ImageIo, PpmHeaderComments) {
    oracle::TempDir dir("io");
    write_text(dir / "c.ppm", std::string("P6\n# made by hand\n2 1\n# depth\n255\n") + "\x01\x02\x03\x04\x05\x06");
    const auto img = io::read_image(dir / "c.ppm");
    EXPECT_EQ(img.at(0, 0), (Rgb{1, 2, 3}));
    EXPECT_EQ(img.at(1, 0), (Rgb{4, 5, 6}));
}

TEST(ImageIo, BadPpmIsIoError) {
    oracle::TempDir dir("io");
    write_text(dir / "trunc.ppm", "P6\n4 4\n255\nabc");
    EXPECT_THROW(io::read_image(dir / "trunc.ppm"), IoError);
    write_text(dir / "deep.ppm", "P6\n1 1\n65535\n\0\0\0\0\0\0");
    EXPECT_THROW(io::read_image(dir / "deep.ppm"), IoError);
    write_text(dir / "ascii.ppm", "P3\n1 1\n255\n1 2 3\n");
    EXPECT_THROW(io::read_image(dir / "ascii.ppm"), IoError);
    write_text(dir / "hdr.ppm", "P6\nx 1\n255\n");
    EXPECT_THROW(io::read_image(dir / "hdr.ppm"), IoError);
}

TEST(ImageIo, MissingOrForeignFileIsIoError) {
    oracle::TempDir dir("io");
    EXPECT_THROW(io::read_image(dir / "none.png"), IoError);
    write_text(dir / "x.png", "definitely not an image");
    EXPECT_THROW(io::read_image(dir / "x.png"), IoError);
    EXPECT_THROW(io::read_mask_png(dir / "x.png"), IoError);
}

TEST(ImageIo, TruncatedPngIsIoError) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(5);
    io::write_png(dir / "a.png", oracle::random_image(rng, 64, 64));
    auto bytes = io::read_file_bytes(dir / "a.png");
    bytes.resize(bytes.size() / 2);
    std::ofstream(dir / "b.png", std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                         static_cast<std::streamsize>(bytes.size()));
    EXPECT_THROW(io::read_image(dir / "b.png"), IoError);
}

TEST(ImageIo, GreyPngReplicatesChannels) {
    oracle::TempDir dir("io");
    TissueMask m(3, 2);
    m.set(1, 0, true);
    io::write_mask_png(dir / "g.png", m);
    const auto img = io::read_image(dir / "g.png");
    EXPECT_EQ(img.at(1, 0), (Rgb{255, 255, 255}));
    EXPECT_EQ(img.at(0, 0), (Rgb{0, 0, 0}));
}

TEST(ImageIo, InterlacedAndSixteenBitPng) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(6);
    const auto img = oracle::random_image(rng, 29, 17);
    write_png_raw(dir / "i.png", img, true, 8);
    EXPECT_EQ(io::read_image(dir / "i.png"), img);
    write_png_raw(dir / "d.png", img, false, 16);
    EXPECT_EQ(io::read_image(dir / "d.png"), img);
}

TEST(ImageIo, MaskRoundTrip) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(7);
    TissueMask m(31, 9);
    for (auto& b : m.bits()) b = rng() & 1;
    io::write_mask_png(dir / "m.png", m);
    EXPECT_TRUE(io::read_mask_png(dir / "m.png").same_bits(m));
}

TEST(FileTileSource, MatchesCropAndReopensOnlyBackward) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(8);
    const auto img = oracle::random_image(rng, 70, 50);
    for (const char* name : {"t.png", "t.ppm"}) {
        if (std::string(name).ends_with("png")) io::write_png(dir / name, img);
        else io::write_ppm(dir / name, img);
        io::FileTileSource src(dir / name);
        EXPECT_EQ(src.width(), 70u);
        EXPECT_EQ(src.height(), 50u);
        for (const Rect r : {Rect{0, 0, 32, 32}, Rect{32, 0, 32, 32}, Rect{64, 0, 6, 32}, Rect{0, 32, 32, 18}}) {
            EXPECT_EQ(src.read(r), img.crop(r)) << name << " " << to_string(r);
        }
        EXPECT_EQ(src.opens(), 1u);
        EXPECT_EQ(src.read({5, 3, 10, 10}), img.crop({5, 3, 10, 10}));
        EXPECT_EQ(src.opens(), 2u);
        EXPECT_THROW(src.read({60, 0, 20, 5}), ValidationError);
    }
}

TEST(FileTileSource, DrivesTiledSegmentation) {
    oracle::TempDir dir("io");
    std::mt19937_64 rng(9);
    const auto img = oracle::random_image(rng, 130, 77);
    io::write_png(dir / "s.png", img);
    io::FileTileSource src(dir / "s.png");
    const auto tiled = segment_he_tiled(src, make_tile_grid(130, 77, 32));
    EXPECT_TRUE(tiled.mask.same_bits(segment_he(img).mask));
    EXPECT_EQ(src.opens(), 2u);  // one pass each
}
