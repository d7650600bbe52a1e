#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "tissueseg/image.hpp"

namespace tissueseg::io {

enum class ImageFormat { png, ppm, unknown };

inline ImageFormat sniff_format(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    unsigned char magic[8] = {};
    in.read(reinterpret_cast<char*>(magic), sizeof magic);
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return ImageFormat::png;
    if (got >= 2 && magic[0] == 'P' && magic[1] == '6') return ImageFormat::ppm;
    return ImageFormat::unknown;
}

/// Sequential decoder yielding one 8-bit RGB row at a time, top to bottom.
class RowReader {
public:
    virtual ~RowReader() = default;
    virtual std::size_t width() const noexcept = 0;
    virtual std::size_t height() const noexcept = 0;
    // Fills `row` (width * 3 bytes) with the next row.
    virtual void read_row(std::span<std::uint8_t> row) = 0;
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    return f;
}

} // namespace detail

/// libpng row decoder. Any PNG colour type and depth is converted to 8-bit
/// RGB (palette expanded, 16-bit stripped, grey replicated, alpha dropped).
/// Interlaced files are decoded whole on open since rows only become final
/// after the last pass.
class PngRowReader final : public RowReader {
public:
    explicit PngRowReader(const std::filesystem::path& path) : path_(path), file_(detail::open_file(path, "rb")) {
        png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, this, on_error, on_warning);
        if (!png_) throw IoError("png: out of memory");
        info_ = png_create_info_struct(png_);
        if (!info_) {
            png_destroy_read_struct(&png_, nullptr, nullptr);
            throw IoError("png: out of memory");
        }
        int passes = 1;
        if (!begin(passes)) fail();
        if (passes > 1) {
            buffer_.resize(width_ * height_ * 3);
            std::vector<png_bytep> rows(height_);
            for (std::size_t y = 0; y < height_; ++y) rows[y] = buffer_.data() + y * width_ * 3;
            if (!read_all(rows.data())) fail();
            buffered_ = true;
        }
    }

    ~PngRowReader() override { png_destroy_read_struct(&png_, &info_, nullptr); }

    PngRowReader(const PngRowReader&) = delete;
    PngRowReader& operator=(const PngRowReader&) = delete;

    std::size_t width() const noexcept override { return width_; }
    std::size_t height() const noexcept override { return height_; }

    void read_row(std::span<std::uint8_t> row) override {
        if (next_ >= height_) throw IoError("png '" + path_.string() + "': read past last row");
        if (row.size() != width_ * 3) throw DimensionError("png: row buffer size mismatch");
        if (buffered_) {
            std::memcpy(row.data(), buffer_.data() + next_ * width_ * 3, row.size());
        } else if (!read_one(row.data())) {
            fail();
        }
        ++next_;
    }

private:
    static void on_error(png_structp png, png_const_charp msg) {
        auto* self = static_cast<PngRowReader*>(png_get_error_ptr(png));
        self->error_ = msg ? msg : "unknown error";
        png_longjmp(png, 1);
    }
    static void on_warning(png_structp, png_const_charp) {}

    [[noreturn]] void fail() const { throw IoError("png '" + path_.string() + "': " + error_); }

    // The setjmp frames below hold no objects with destructors.
    bool begin(int& passes) noexcept {
        if (setjmp(png_jmpbuf(png_))) return false;
        png_init_io(png_, file_.get());
        png_read_info(png_, info_);
        const png_uint_32 w = png_get_image_width(png_, info_);
        const png_uint_32 h = png_get_image_height(png_, info_);
        const int depth = png_get_bit_depth(png_, info_);
        const int colour = png_get_color_type(png_, info_);
        if (colour == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_);
        if (colour == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png_);
        if (png_get_valid(png_, info_, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_);
        if (depth == 16) png_set_strip_16(png_);
        if (colour == PNG_COLOR_TYPE_GRAY || colour == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png_);
        png_set_strip_alpha(png_);
        passes = png_set_interlace_handling(png_);
        png_read_update_info(png_, info_);
        width_ = w;
        height_ = h;
        if (png_get_channels(png_, info_) != 3 || png_get_rowbytes(png_, info_) != width_ * 3) {
            error_ = "cannot convert to 8-bit RGB";
            return false;
        }
        return true;
    }

    bool read_one(png_bytep row) noexcept {
        if (setjmp(png_jmpbuf(png_))) return false;
        png_read_row(png_, row, nullptr);
        return true;
    }

    bool read_all(png_bytepp rows) noexcept {
        if (setjmp(png_jmpbuf(png_))) return false;
        png_read_image(png_, rows);
        return true;
    }

    std::filesystem::path path_;
    detail::FilePtr file_;
    png_structp png_ = nullptr;
    png_infop info_ = nullptr;
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t next_ = 0;
    bool buffered_ = false;
    std::vector<std::uint8_t> buffer_;
    std::string error_ = "decode error";
};

/// Binary PPM (P6) decoder. Only maxval 255 is accepted.
class PpmRowReader final : public RowReader {
public:
    explicit PpmRowReader(const std::filesystem::path& path) : path_(path), file_(detail::open_file(path, "rb")) {
        std::FILE* f = file_.get();
        if (std::fgetc(f) != 'P' || std::fgetc(f) != '6') bad("missing P6 magic");
        const long w = header_int();
        const long h = header_int();
        const long maxval = header_int();
        if (w <= 0 || h <= 0) bad("non-positive dimensions");
        if (maxval != 255) bad("maxval " + std::to_string(maxval) + " unsupported (need 255)");
        width_ = static_cast<std::size_t>(w);
        height_ = static_cast<std::size_t>(h);
    }

    std::size_t width() const noexcept override { return width_; }
    std::size_t height() const noexcept override { return height_; }

    void read_row(std::span<std::uint8_t> row) override {
        if (next_ >= height_) bad("read past last row");
        if (row.size() != width_ * 3) throw DimensionError("ppm: row buffer size mismatch");
        if (std::fread(row.data(), 1, row.size(), file_.get()) != row.size()) {
            bad("truncated at row " + std::to_string(next_));
        }
        ++next_;
    }

private:
    [[noreturn]] void bad(const std::string& why) const { throw IoError("ppm '" + path_.string() + "': " + why); }

    // Skips whitespace and comments, then parses one decimal field. The single
    // whitespace byte after the field is consumed.
    long header_int() {
        std::FILE* f = file_.get();
        int c = std::fgetc(f);
        for (;;) {
            if (c == '#') {
                while (c != '\n' && c != EOF) c = std::fgetc(f);
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                c = std::fgetc(f);
            } else {
                break;
            }
        }
        if (c < '0' || c > '9') bad("malformed header");
        long v = 0;
        while (c >= '0' && c <= '9') {
            v = v * 10 + (c - '0');
            if (v > 1L << 30) bad("header value too large");
            c = std::fgetc(f);
        }
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r') bad("malformed header");
        return v;
    }

    std::filesystem::path path_;
    detail::FilePtr file_;
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t next_ = 0;
};

inline std::unique_ptr<RowReader> open_row_reader(const std::filesystem::path& path) {
    switch (sniff_format(path)) {
    case ImageFormat::png: return std::make_unique<PngRowReader>(path);
    case ImageFormat::ppm: return std::make_unique<PpmRowReader>(path);
    case ImageFormat::unknown: break;
    }
    throw IoError("'" + path.string() + "': not a PNG or binary PPM (P6) file");
}

/// Decodes a PNG or P6 PPM into 8-bit RGB.
inline RgbImage read_image(const std::filesystem::path& path) {
    auto reader = open_row_reader(path);
    RgbImage img(reader->width(), reader->height());
    for (std::size_t y = 0; y < img.height(); ++y) reader->read_row(img.row(y));
    return img;
}

/// Tile source streaming rows from an image file. Holds one horizontal band
/// of rows; requests inside the band are served from it, requests below it
/// decode forward, and requests above it reopen the file.
class FileTileSource {
public:
    explicit FileTileSource(std::filesystem::path path) : path_(std::move(path)) { reopen(); }

    std::size_t width() const noexcept { return reader_->width(); }
    std::size_t height() const noexcept { return reader_->height(); }

    RgbImage read(const Rect& r) {
        tissueseg::detail::require_within(r, width(), height(), "FileTileSource::read");
        if (r.y < band_y_ || r.y + r.h > band_y_ + band_rows_) load_band(r);
        RgbImage out(r.w, r.h);
        const std::size_t stride = width() * 3;
        for (std::size_t y = 0; y < r.h; ++y) {
            const std::uint8_t* src = band_.data() + (r.y - band_y_ + y) * stride + r.x * 3;
            std::memcpy(out.row(y).data(), src, r.w * 3);
        }
        return out;
    }

    // Number of times the file has been opened; exposed for tests.
    std::size_t opens() const noexcept { return opens_; }

private:
    void reopen() {
        reader_ = open_row_reader(path_);
        next_row_ = 0;
        band_y_ = 0;
        band_rows_ = 0;
        ++opens_;
    }

    void load_band(const Rect& r) {
        if (r.y < next_row_) reopen();
        const std::size_t stride = width() * 3;
        std::vector<std::uint8_t> skip(stride);
        while (next_row_ < r.y) {
            reader_->read_row(skip);
            ++next_row_;
        }
        band_.resize(r.h * stride);
        for (std::size_t y = 0; y < r.h; ++y) {
            reader_->read_row(std::span<std::uint8_t>(band_).subspan(y * stride, stride));
            ++next_row_;
        }
        band_y_ = r.y;
        band_rows_ = r.h;
    }

    std::filesystem::path path_;
    std::unique_ptr<RowReader> reader_;
    std::size_t next_row_ = 0;
    std::size_t band_y_ = 0;
    std::size_t band_rows_ = 0;
    std::vector<std::uint8_t> band_;
    std::size_t opens_ = 0;
};

namespace detail {

inline void write_png(const std::filesystem::path& path, std::size_t w, std::size_t h, png_uint_32 format,
                      const std::uint8_t* data, std::size_t stride) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = format;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, static_cast<png_int_32>(stride), nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write '" + path.string() + "': " + msg);
    }
}

} // namespace detail

inline void write_png(const std::filesystem::path& path, const RgbImage& img) {
    detail::write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, img.bytes().data(), img.width() * 3);
}

inline void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
    auto f = detail::open_file(path, "wb");
    const std::string header = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    const auto bytes = img.bytes();
    if (std::fwrite(header.data(), 1, header.size(), f.get()) != header.size() ||
        std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

/// Single-channel 8-bit PNG: 0 background, 255 tissue.
inline void write_mask_png(const std::filesystem::path& path, const TissueMask& mask) {
    std::vector<std::uint8_t> grey(mask.size());
    auto bits = mask.bits();
    for (std::size_t i = 0; i < grey.size(); ++i) grey[i] = bits[i] ? 255 : 0;
    detail::write_png(path, mask.width(), mask.height(), PNG_FORMAT_GRAY, grey.data(), mask.width());
}

/// Reads a mask PNG; grey values >= 128 are tissue.
inline TissueMask read_mask_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError("cannot read mask '" + path.string() + "': " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> grey(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, grey.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot read mask '" + path.string() + "': " + msg);
    }
    std::vector<std::uint8_t> bits(grey.size());
    for (std::size_t i = 0; i < grey.size(); ++i) bits[i] = grey[i] >= 128 ? 1 : 0;
    return TissueMask(image.width, image.height, std::move(bits));
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace tissueseg::io
