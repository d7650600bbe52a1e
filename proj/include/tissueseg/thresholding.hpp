#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

#include "tissueseg/image.hpp"
#include "tissueseg/parallel.hpp"

namespace tissueseg {

inline constexpr std::size_t kBins = 256;

/// 256 equal-width bins over [0, 1]. Bin i holds i/256 <= v < (i+1)/256;
/// the last bin also takes v == 1.
struct Histogram256 {
    std::array<std::uint64_t, kBins> counts{};
    std::uint64_t total = 0;

    static constexpr double bin_width = 1.0 / kBins;

    static std::size_t bin_of(float v) noexcept {
        if (!(v > 0.0f)) return 0;
        if (v >= 1.0f) return kBins - 1;
        const auto i = static_cast<std::size_t>(v * static_cast<float>(kBins));
        return i < kBins ? i : kBins - 1;
    }

    static double bin_center(std::size_t i) noexcept { return (static_cast<double>(i) + 0.5) / kBins; }

    void add(float v) noexcept {
        ++counts[bin_of(v)];
        ++total;
    }

    void add(std::span<const float> values) noexcept {
        for (float v : values) ++counts[bin_of(v)];
        total += values.size();
    }

    std::size_t occupied_bins() const noexcept {
        std::size_t n = 0;
        for (auto c : counts) n += c != 0;
        return n;
    }

    friend bool operator==(const Histogram256&, const Histogram256&) = default;
};

inline Histogram256 merge_histograms(const Histogram256& a, const Histogram256& b) noexcept {
    Histogram256 out;
    for (std::size_t i = 0; i < kBins; ++i) out.counts[i] = a.counts[i] + b.counts[i];
    out.total = a.total + b.total;
    return out;
}

inline Histogram256 build_histogram(const ScalarField& field, unsigned threads = 1) {
    const auto values = field.values();
    std::vector<Histogram256> partial(chunk_count(values.size(), threads));
    parallel_chunks(values.size(), threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        partial[c].add(values.subspan(begin, end - begin));
    });
    Histogram256 out;
    for (const auto& h : partial) out = merge_histograms(out, h);
    return out;
}

struct Threshold {
    double gamma = 0.0;         // upper edge of the winning bin, (bin_index + 1) / 256
    std::size_t bin_index = 0;  // last bin of the low class
    double variance = 0.0;      // between-class variance at the optimum
    bool degenerate = false;    // no split separates two non-empty classes
};

/// Two-class statistics of the split "bins 0..t | bins t+1..255", using bin
/// centres as the class values.
struct ClassSplit {
    double weight_low = 0.0;
    double weight_high = 0.0;
    double mean_low = 0.0;
    double mean_high = 0.0;

    double between_class_variance() const noexcept {
        const double d = mean_low - mean_high;
        return weight_low * weight_high * d * d;
    }
};

inline ClassSplit class_split(const Histogram256& hist, std::size_t t) {
    if (hist.total == 0) throw DegenerateInputError("class_split: empty histogram");
    if (t >= kBins) throw ValidationError("class_split: split index out of range");
    double n_low = 0.0, s_low = 0.0, n_high = 0.0, s_high = 0.0;
    for (std::size_t i = 0; i < kBins; ++i) {
        const double n = static_cast<double>(hist.counts[i]);
        if (i <= t) {
            n_low += n;
            s_low += n * Histogram256::bin_center(i);
        } else {
            n_high += n;
            s_high += n * Histogram256::bin_center(i);
        }
    }
    const double total = static_cast<double>(hist.total);
    ClassSplit s;
    s.weight_low = n_low / total;
    s.weight_high = n_high / total;
    s.mean_low = n_low > 0 ? s_low / n_low : 0.0;
    s.mean_high = n_high > 0 ? s_high / n_high : 0.0;
    return s;
}

/// Otsu threshold: the split maximizing w0 * w1 * (mu0 - mu1)^2.
///
/// With class sums taken over 2i+1 (twice the bin centre in units of 1/512),
/// the objective is proportional to (S0*N - S*N0)^2 / (N0 * N1), so
/// candidates are ranked by exact integer cross-multiplication. Ties go to
/// the smallest bin index; an empty class scores 0.
inline Threshold otsu_threshold(const Histogram256& hist) {
    using boost::multiprecision::int512_t;
    if (hist.total == 0) throw DegenerateInputError("otsu_threshold: empty histogram");

    std::uint64_t total_sum = 0;
    for (std::size_t i = 0; i < kBins; ++i) total_sum += hist.counts[i] * (2 * i + 1);
    const std::uint64_t n = hist.total;

    bool have_best = false;
    std::size_t best = 0;
    int512_t best_num = 0;  // (S0*N - S*N0)^2
    int512_t best_den = 1;  // N0 * N1

    std::uint64_t n_low = 0;
    std::uint64_t s_low = 0;
    for (std::size_t t = 0; t < kBins; ++t) {
        n_low += hist.counts[t];
        s_low += hist.counts[t] * (2 * t + 1);
        const std::uint64_t n_high = n - n_low;
        if (n_low == 0 || n_high == 0) continue;
        const int512_t diff = int512_t(s_low) * n - int512_t(total_sum) * n_low;
        const int512_t num = diff * diff;
        const int512_t den = int512_t(n_low) * n_high;
        if (!have_best || num * best_den > best_num * den) {
            have_best = true;
            best = t;
            best_num = num;
            best_den = den;
        }
    }

    Threshold thr;
    if (!have_best || best_num == 0) {
        thr.bin_index = 0;
        thr.gamma = 1.0 / kBins;
        thr.variance = 0.0;
        thr.degenerate = true;
        return thr;
    }
    thr.bin_index = best;
    thr.gamma = static_cast<double>(best + 1) / kBins;
    thr.variance = class_split(hist, best).between_class_variance();
    return thr;
}

// he: tissue is the bright (high-T) class. luminance: tissue is the dark class.
inline bool is_tissue(float v, double gamma, Method method) noexcept {
    return method == Method::he_representation ? static_cast<double>(v) > gamma
                                               : static_cast<double>(v) < gamma;
}

inline void threshold_row(std::span<const float> values, double gamma, Method method,
                          std::span<std::uint8_t> out) noexcept {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = is_tissue(values[i], gamma, method) ? 1 : 0;
}

/// he: bits[p] = field[p] > gamma. luminance: bits[p] = field[p] < gamma,
/// which is exactly the low Otsu class because gamma is a bin edge.
inline TissueMask apply_threshold(const ScalarField& field, const Threshold& thr, Method method) {
    TissueMask mask(field.width(), field.height(), method, thr.gamma);
    threshold_row(field.values(), thr.gamma, method, mask.bits());
    return mask;
}

} // namespace tissueseg
