#pragma once

// Reference computations used only by tests. Each one recomputes its result
// from the definition rather than sharing code with the library path it
// checks.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "tissueseg/image.hpp"
#include "tissueseg/thresholding.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

/// Direct between-class variance for split t, exact: both class weights and
/// both class means are rebuilt from scratch with rational arithmetic using
/// bin centres (i + 1/2) / 256.
inline cpp_rational between_class_variance(const tissueseg::Histogram256& h, std::size_t t) {
    cpp_int n0 = 0, n1 = 0;
    cpp_rational m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < 256; ++i) {
        const cpp_rational centre(cpp_int(2 * i + 1), cpp_int(512));
        if (i <= t) {
            n0 += h.counts[i];
            m0 += centre * cpp_int(h.counts[i]);
        } else {
            n1 += h.counts[i];
            m1 += centre * cpp_int(h.counts[i]);
        }
    }
    if (n0 == 0 || n1 == 0) return 0;
    const cpp_int n = n0 + n1;
    const cpp_rational w0(n0, n), w1(n1, n);
    const cpp_rational mu0 = m0 / cpp_rational(n0);
    const cpp_rational mu1 = m1 / cpp_rational(n1);
    const cpp_rational d = mu0 - mu1;
    return w0 * w1 * d * d;
}

/// Exhaustive scan; first maximum wins.
inline std::size_t otsu_argmax(const tissueseg::Histogram256& h) {
    std::size_t best = 0;
    cpp_rational best_v = -1;
    for (std::size_t t = 0; t < 256; ++t) {
        const cpp_rational v = between_class_variance(h, t);
        if (v > best_v) {
            best_v = v;
            best = t;
        }
    }
    return best;
}

/// T > 0 exactly when r > g and b > g; for each g there are (255 - g)^2
/// such (r, b) pairs, so the count is sum_{k=1}^{255} k^2.
inline std::uint64_t cube_positive_count() {
    constexpr std::uint64_t n = 255;
    return n * (n + 1) * (2 * n + 1) / 6;
}

/// Random histogram with a mix of sparse, dense and tied shapes.
inline tissueseg::Histogram256 random_histogram(std::mt19937_64& rng) {
    tissueseg::Histogram256 h;
    const auto shape = rng() % 5;
    auto add = [&](std::size_t bin, std::uint64_t c) {
        h.counts[bin] += c;
        h.total += c;
    };
    switch (shape) {
    case 0:  // dense
        for (std::size_t i = 0; i < 256; ++i) add(i, rng() % 1000);
        break;
    case 1:  // sparse
        for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) add(rng() % 256, 1 + rng() % 5000);
        break;
    case 2: {  // two equal spikes: plateau of exact ties
        const std::size_t a = rng() % 128, b = 128 + rng() % 128;
        const std::uint64_t c = 1 + rng() % 100000;
        add(a, c);
        add(b, c);
        break;
    }
    case 3: {  // symmetric about the centre: more ties
        for (std::size_t i = 0; i < 128; ++i) {
            if (rng() % 4 == 0) {
                const std::uint64_t c = rng() % 50;
                add(i, c);
                add(255 - i, c);
            }
        }
        break;
    }
    default:  // bimodal, large counts
        for (std::size_t i = 0; i < 256; ++i) {
            const double da = (static_cast<double>(i) - 40.0) / 12.0;
            const double db = (static_cast<double>(i) - 180.0) / 20.0;
            add(i, static_cast<std::uint64_t>(5e6 * std::exp(-da * da) + 2e6 * std::exp(-db * db)) + rng() % 3);
        }
        break;
    }
    if (h.total == 0) add(rng() % 256, 1);
    return h;
}

inline tissueseg::RgbImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
    tissueseg::RgbImage img(w, h);
    for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tissueseg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace oracle
