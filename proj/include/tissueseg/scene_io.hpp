#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tissueseg/synthgen.hpp"

namespace tissueseg::synth {

// Scene documents are JSON objects with keys in a fixed order, one scene
// per file.
using Json = nlohmann::ordered_json;

inline constexpr int kSceneSchemaVersion = 1;

namespace detail {

inline Json to_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

inline Json to_json(const std::vector<Point>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(Json::array({p.x, p.y}));
    return a;
}

inline Rgb rgb_from(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw ValidationError("scene: colour must be [r, g, b]");
    auto byte = [](const Json& v) {
        const int i = v.get<int>();
        if (i < 0 || i > 255) throw ValidationError("scene: colour component out of range");
        return static_cast<std::uint8_t>(i);
    };
    return {byte(j[0]), byte(j[1]), byte(j[2])};
}

inline std::vector<Point> points_from(const Json& j) {
    if (!j.is_array()) throw ValidationError("scene: point list must be an array");
    std::vector<Point> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("scene: point must be [x, y]");
        out.push_back({p[0].get<int>(), p[1].get<int>()});
    }
    return out;
}

} // namespace detail

inline Json scene_to_json(const SynthScene& s) {
    using detail::to_json;
    Json j;
    j["schema_version"] = kSceneSchemaVersion;
    j["id"] = s.id;
    j["seed"] = s.seed;
    j["width"] = s.width;
    j["height"] = s.height;
    j["category"] = std::string(to_string(s.category));
    j["expected_failure"] = s.expected_failure;
    j["background"] = to_json(s.background);
    j["noise"] = s.noise;

    Json blobs = Json::array();
    for (const auto& b : s.tissue_blobs) {
        Json o;
        o["outline"] = to_json(b.outline);
        o["smoothing"] = b.smoothing;
        o["eosin"] = to_json(b.eosin);
        o["haematoxylin"] = to_json(b.haematoxylin);
        o["texture_cell"] = b.texture_cell;
        blobs.push_back(std::move(o));
    }
    j["tissue_blobs"] = std::move(blobs);

    if (s.bounding_box) {
        const auto& bb = *s.bounding_box;
        Json o;
        o["x"] = bb.origin.x;
        o["y"] = bb.origin.y;
        o["w"] = bb.w;
        o["h"] = bb.h;
        o["thickness"] = bb.thickness;
        o["colour"] = to_json(bb.colour);
        j["bounding_box"] = std::move(o);
    } else {
        j["bounding_box"] = nullptr;
    }

    Json dark = Json::array();
    for (const auto& b : s.dark_blobs) {
        Json o;
        o["outline"] = to_json(b.outline);
        o["smoothing"] = b.smoothing;
        o["colour"] = to_json(b.colour);
        dark.push_back(std::move(o));
    }
    j["dark_blobs"] = std::move(dark);

    Json text = Json::array();
    for (const auto& t : s.text) {
        Json o;
        o["x"] = t.origin.x;
        o["y"] = t.origin.y;
        o["glyphs"] = t.glyphs;
        o["scale"] = t.scale;
        o["glyph_seed"] = t.glyph_seed;
        o["colour"] = to_json(t.colour);
        text.push_back(std::move(o));
    }
    j["text"] = std::move(text);

    Json pens = Json::array();
    for (const auto& p : s.pen_strokes) {
        Json o;
        o["colour"] = p.colour;
        o["width"] = p.width;
        o["points"] = to_json(p.points);
        pens.push_back(std::move(o));
    }
    j["pen_strokes"] = std::move(pens);
    return j;
}

/// Parses and validates a scene document.
inline SynthScene scene_from_json(const Json& j) {
    using detail::points_from;
    using detail::rgb_from;
    try {
        if (j.value("schema_version", 0) != kSceneSchemaVersion) {
            throw ValidationError("scene: unsupported schema_version");
        }
        SynthScene s;
        s.id = j.at("id").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.category = parse_category(j.at("category").get<std::string>());
        s.expected_failure = j.at("expected_failure").get<bool>();
        s.background = rgb_from(j.at("background"));
        s.noise = j.at("noise").get<int>();
        for (const auto& o : j.at("tissue_blobs")) {
            TissueBlob b;
            b.outline = points_from(o.at("outline"));
            b.smoothing = o.at("smoothing").get<int>();
            b.eosin = rgb_from(o.at("eosin"));
            b.haematoxylin = rgb_from(o.at("haematoxylin"));
            b.texture_cell = o.at("texture_cell").get<int>();
            s.tissue_blobs.push_back(std::move(b));
        }
        if (const auto& bbj = j.at("bounding_box"); !bbj.is_null()) {
            BoundingBox bb;
            bb.origin = {bbj.at("x").get<int>(), bbj.at("y").get<int>()};
            bb.w = bbj.at("w").get<int>();
            bb.h = bbj.at("h").get<int>();
            bb.thickness = bbj.at("thickness").get<int>();
            bb.colour = rgb_from(bbj.at("colour"));
            s.bounding_box = bb;
        }
        for (const auto& o : j.at("dark_blobs")) {
            DarkBlob b;
            b.outline = points_from(o.at("outline"));
            b.smoothing = o.at("smoothing").get<int>();
            b.colour = rgb_from(o.at("colour"));
            s.dark_blobs.push_back(std::move(b));
        }
        for (const auto& o : j.at("text")) {
            TextCluster t;
            t.origin = {o.at("x").get<int>(), o.at("y").get<int>()};
            t.glyphs = o.at("glyphs").get<int>();
            t.scale = o.at("scale").get<int>();
            t.glyph_seed = o.at("glyph_seed").get<std::uint64_t>();
            t.colour = rgb_from(o.at("colour"));
            s.text.push_back(t);
        }
        for (const auto& o : j.at("pen_strokes")) {
            PenStroke p;
            p.colour = o.at("colour").get<std::string>();
            p.width = o.at("width").get<int>();
            p.points = points_from(o.at("points"));
            s.pen_strokes.push_back(std::move(p));
        }
        validate(s);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scene: ") + e.what());
    }
}

inline void write_scene(const std::filesystem::path& path, const SynthScene& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << scene_to_json(s).dump(2) << '\n';
    if (!out) throw IoError("cannot write '" + path.string() + "'");
}

inline SynthScene read_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
    return scene_from_json(j);
}

} // namespace tissueseg::synth
