#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tissueseg/image.hpp"

namespace tissueseg {

/// Ground-truth class of a pixel in a labelled scene.
enum class Label : std::uint8_t {
    background = 0,
    tissue = 1,
    pen = 2,
    bounding_box = 3,
    scan_artefact = 4,
};

inline constexpr std::size_t kLabelCount = 5;

inline std::string_view to_string(Label l) noexcept {
    switch (l) {
    case Label::background: return "background";
    case Label::tissue: return "tissue";
    case Label::pen: return "pen";
    case Label::bounding_box: return "bounding_box";
    case Label::scan_artefact: return "scan_artefact";
    }
    return "unknown";
}

class LabelRaster {
public:
    LabelRaster() = default;
    LabelRaster(std::size_t width, std::size_t height, Label fill = Label::background)
        : width_(width), height_(height), labels_(width * height, fill) {
        detail::require_shape(width, height, "LabelRaster");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return labels_.size(); }

    Label at(std::size_t x, std::size_t y) const noexcept { return labels_[y * width_ + x]; }
    void set(std::size_t x, std::size_t y, Label l) noexcept { labels_[y * width_ + x] = l; }
    std::span<const Label> labels() const noexcept { return labels_; }

    std::array<std::size_t, kLabelCount> histogram() const noexcept {
        std::array<std::size_t, kLabelCount> h{};
        for (auto l : labels_) ++h[static_cast<std::size_t>(l)];
        return h;
    }

    TissueMask tissue_mask() const {
        TissueMask m(width_, height_);
        auto bits = m.bits();
        for (std::size_t i = 0; i < labels_.size(); ++i) bits[i] = labels_[i] == Label::tissue;
        return m;
    }

    friend bool operator==(const LabelRaster&, const LabelRaster&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Label> labels_;
};

namespace detail {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, std::string_view what) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionError(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()));
    }
}

inline double ratio_or(std::size_t num, std::size_t den, double fallback) noexcept {
    return den == 0 ? fallback : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

inline ConfusionCounts confusion(const TissueMask& pred, const TissueMask& truth) {
    detail::require_same_shape(pred, truth, "confusion");
    ConfusionCounts c;
    auto p = pred.bits();
    auto t = truth.bits();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i]) {
            t[i] ? ++c.tp : ++c.fp;
        } else {
            t[i] ? ++c.fn : ++c.tn;
        }
    }
    return c;
}

inline double dice_from_counts(const ConfusionCounts& c) noexcept {
    const std::size_t den = 2 * c.tp + c.fp + c.fn;
    return den == 0 ? 1.0 : static_cast<double>(2 * c.tp) / static_cast<double>(den);
}

/// Sørensen–Dice coefficient 2|A∩B| / (|A| + |B|); 1 when both masks are empty.
inline double dice(const TissueMask& pred, const TissueMask& truth) {
    return dice_from_counts(confusion(pred, truth));
}

struct MaskComparison {
    double dice = 1.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    std::size_t artefact_pixels_in_mask = 0;  // pen + scan artefact
    std::size_t background_pixels_in_mask = 0;
    std::size_t bounding_box_pixels_in_mask = 0;
    std::size_t pen_pixels_in_mask = 0;
    double tissue_recall = 1.0;
    double background_rejection = 1.0;
    double background_leak = 0.0;
    double bounding_box_leak = 0.0;
    double artefact_leak = 0.0;
};

struct SuccessCriteria {
    bool all_tissue_segmented = false;
    bool all_background_rejected = false;
    bool all_bounding_boxes_rejected = false;
    bool all_artefacts_rejected = false;
    bool success = false;
};

/// Per-region pass limits. A region with no pixels passes trivially.
struct EvalTolerances {
    double min_tissue_recall = 0.99;
    double max_background_leak = 0.001;
    double max_bounding_box_leak = 0.001;
    double max_artefact_leak = 0.001;
};

struct Evaluation {
    MaskComparison comparison;
    SuccessCriteria criteria;
};

/// Scores a predicted mask against a labelled scene. Tissue is the positive
/// class. Every other label is tallied separately so each success flag can
/// be checked against its own tolerance.
inline Evaluation evaluate(const TissueMask& pred, const LabelRaster& labels, const EvalTolerances& tol = {}) {
    detail::require_same_shape(pred, labels, "evaluate");
    std::array<std::size_t, kLabelCount> in_mask{};
    const auto totals = labels.histogram();
    auto bits = pred.bits();
    auto lab = labels.labels();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) ++in_mask[static_cast<std::size_t>(lab[i])];
    }
    const auto idx = [](Label l) { return static_cast<std::size_t>(l); };

    MaskComparison mc;
    mc.tp = in_mask[idx(Label::tissue)];
    mc.fn = totals[idx(Label::tissue)] - mc.tp;
    mc.fp = 0;
    for (std::size_t l = 0; l < kLabelCount; ++l) {
        if (l != idx(Label::tissue)) mc.fp += in_mask[l];
    }
    mc.tn = labels.size() - mc.tp - mc.fn - mc.fp;
    mc.dice = dice_from_counts({mc.tp, mc.fp, mc.fn, mc.tn});

    const std::size_t artefact_total = totals[idx(Label::pen)] + totals[idx(Label::scan_artefact)];
    mc.pen_pixels_in_mask = in_mask[idx(Label::pen)];
    mc.artefact_pixels_in_mask = in_mask[idx(Label::pen)] + in_mask[idx(Label::scan_artefact)];
    mc.background_pixels_in_mask = in_mask[idx(Label::background)];
    mc.bounding_box_pixels_in_mask = in_mask[idx(Label::bounding_box)];

    mc.tissue_recall = detail::ratio_or(mc.tp, mc.tp + mc.fn, 1.0);
    mc.background_leak = detail::ratio_or(mc.background_pixels_in_mask, totals[idx(Label::background)], 0.0);
    mc.background_rejection = 1.0 - mc.background_leak;
    mc.bounding_box_leak =
        detail::ratio_or(mc.bounding_box_pixels_in_mask, totals[idx(Label::bounding_box)], 0.0);
    mc.artefact_leak = detail::ratio_or(mc.artefact_pixels_in_mask, artefact_total, 0.0);

    SuccessCriteria sc;
    sc.all_tissue_segmented = mc.tissue_recall >= tol.min_tissue_recall;
    sc.all_background_rejected = mc.background_leak <= tol.max_background_leak;
    sc.all_bounding_boxes_rejected = mc.bounding_box_leak <= tol.max_bounding_box_leak;
    sc.all_artefacts_rejected = mc.artefact_leak <= tol.max_artefact_leak;
    sc.success = sc.all_tissue_segmented && sc.all_background_rejected && sc.all_bounding_boxes_rejected &&
                 sc.all_artefacts_rejected;
    return {mc, sc};
}

} // namespace tissueseg
