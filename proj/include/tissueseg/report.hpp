#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "tissueseg/metrics.hpp"
#include "tissueseg/pipeline.hpp"

namespace tissueseg {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Reports keep insertion order so serialized key order is canonical. Every
// report has the top-level keys schema_version, tool_version, command,
// canonical and timings; only `timings` varies between identical runs.
using Json = nlohmann::ordered_json;

inline Json report_envelope(std::string_view command) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = std::string(command);
    return j;
}

inline Json to_json(const SegmentationReport& r) {
    Json j;
    j["method"] = std::string(to_string(r.method));
    j["gamma"] = r.gamma;
    j["bin_index"] = r.bin_index;
    j["variance"] = r.variance;
    j["degenerate"] = r.degenerate;
    j["tissue_pixel_count"] = r.tissue_pixel_count;
    j["total_pixels"] = r.total_pixels;
    j["tissue_fraction"] = r.tissue_fraction;
    return j;
}

inline Json to_json(const MaskComparison& m) {
    Json j;
    j["dice"] = m.dice;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    j["tn"] = m.tn;
    j["artefact_pixels_in_mask"] = m.artefact_pixels_in_mask;
    j["pen_pixels_in_mask"] = m.pen_pixels_in_mask;
    j["background_pixels_in_mask"] = m.background_pixels_in_mask;
    j["bounding_box_pixels_in_mask"] = m.bounding_box_pixels_in_mask;
    j["tissue_recall"] = m.tissue_recall;
    j["background_rejection"] = m.background_rejection;
    j["background_leak"] = m.background_leak;
    j["bounding_box_leak"] = m.bounding_box_leak;
    j["artefact_leak"] = m.artefact_leak;
    return j;
}

inline Json to_json(const SuccessCriteria& s) {
    Json j;
    j["all_tissue_segmented"] = s.all_tissue_segmented;
    j["all_background_rejected"] = s.all_background_rejected;
    j["all_bounding_boxes_rejected"] = s.all_bounding_boxes_rejected;
    j["all_artefacts_rejected"] = s.all_artefacts_rejected;
    j["success"] = s.success;
    return j;
}

inline Json to_json(const EvalTolerances& t) {
    Json j;
    j["min_tissue_recall"] = t.min_tissue_recall;
    j["max_background_leak"] = t.max_background_leak;
    j["max_bounding_box_leak"] = t.max_bounding_box_leak;
    j["max_artefact_leak"] = t.max_artefact_leak;
    return j;
}

inline Json to_json(const CubeAnalysis& c) {
    Json j;
    j["step"] = c.step;
    j["axis_points"] = c.axis_points;
    j["total_points"] = c.total_points;
    j["count_nonzero"] = c.count_nonzero;
    j["fraction"] = c.fraction;
    j["max_value"] = c.max_value;
    j["argmax"] = Json::array({c.argmax.r, c.argmax.g, c.argmax.b});
    return j;
}

} // namespace tissueseg
