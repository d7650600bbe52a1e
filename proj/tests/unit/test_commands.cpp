#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scenes.hpp"
#include "tissueseg/commands.hpp"

using namespace tissueseg;
using namespace tissueseg::cli;

namespace {

Json load_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return Json::parse(in);
}

// Runs the CLI binary through the shell and returns its exit status.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(TISSUESEG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// One corpus shared by the eval tests; generating it takes a few seconds.
const std::filesystem::path& shared_corpus() {
    static oracle::TempDir dir("corpus");
    static const bool made = [] {
        std::ostringstream out, err;
        return cmd_gen({0, dir.path()}, out, err) == kExitOk;
    }();
    EXPECT_TRUE(made);
    return dir.path();
}

} // namespace

TEST(SegmentCommand, WritesMaskAndReport) {
    oracle::TempDir dir("seg");
    const auto r = synth::generate(scenes::with_pen("blue"));
    io::write_png(dir / "in.png", r.image);
    SegmentCommand c;
    c.input = dir / "in.png";
    c.out = dir / "mask.png";
    c.report = dir / "r.json";
    std::ostringstream out, err;
    ASSERT_EQ(cmd_segment(c, out, err), kExitOk) << err.str();
    EXPECT_GE(dice(io::read_mask_png(c.out), r.truth), 0.95);

    const Json j = load_json(*c.report);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["command"], "segment");
    EXPECT_EQ(j["canonical"]["segmentation"]["method"], "he");
    EXPECT_EQ(j["canonical"]["segmentation"]["degenerate"], false);
    EXPECT_EQ(j["canonical"]["width"], 400);
    EXPECT_TRUE(j["timings"].contains("elapsed_ms"));
}

TEST(SegmentCommand, TiledOutputIsByteIdentical) {
    oracle::TempDir dir("seg");
    const auto r = synth::generate(scenes::with_pen("red", 700, 530));
    io::write_ppm(dir / "in.ppm", r.image);
    SegmentCommand c;
    c.input = dir / "in.ppm";
    c.out = dir / "whole.png";
    std::ostringstream out, err;
    ASSERT_EQ(cmd_segment(c, out, err), kExitOk);
    c.tiled = true;
    c.tile_size = 128;
    c.out = dir / "tiled.png";
    ASSERT_EQ(cmd_segment(c, out, err), kExitOk);
    EXPECT_EQ(io::read_file_bytes(dir / "whole.png"), io::read_file_bytes(dir / "tiled.png"));
}

TEST(SegmentCommand, BlankSlideReportsDegenerate) {
    oracle::TempDir dir("seg");
    io::write_png(dir / "w.png", RgbImage(1, 1, Rgb{255, 255, 255}));
    SegmentCommand c;
    c.input = dir / "w.png";
    c.out = dir / "m.png";
    c.report = dir / "r.json";
    std::ostringstream out, err;
    ASSERT_EQ(cmd_segment(c, out, err), kExitOk);
    EXPECT_EQ(load_json(*c.report)["canonical"]["segmentation"]["degenerate"], true);
    EXPECT_EQ(io::read_mask_png(c.out).count(), 0u);
}

TEST(SegmentCommand, BadInputsExitTwo) {
    oracle::TempDir dir("seg");
    std::ostringstream out, err;
    SegmentCommand c;
    c.input = dir / "missing.png";
    c.out = dir / "m.png";
    EXPECT_EQ(cmd_segment(c, out, err), kExitUsage);
    std::ofstream(dir / "junk.png") << "junk";
    c.input = dir / "junk.png";
    EXPECT_EQ(cmd_segment(c, out, err), kExitUsage);
    io::write_png(dir / "ok.png", RgbImage(4, 4));
    c.input = dir / "ok.png";
    c.tiled = true;
    c.tile_size = 100;
    EXPECT_EQ(cmd_segment(c, out, err), kExitUsage);
}

TEST(GenCommand, WritesCorpusDeterministically) {
    const auto& a = shared_corpus();
    EXPECT_EQ(list_corpus(a).size(), 60u);
    for (int id : {0, 6, 59}) {
        const std::string stem = cli::detail::scene_stem(id);
        EXPECT_TRUE(std::filesystem::exists(a / (stem + ".png")));
        EXPECT_TRUE(std::filesystem::exists(a / (stem + "_truth.png")));
        EXPECT_TRUE(std::filesystem::exists(a / (stem + ".json")));
    }
    const Json manifest = load_json(a / "corpus.json");
    EXPECT_EQ(manifest["scenes"].size(), 60u);

    oracle::TempDir b("gen");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_gen({0, b.path()}, out, err), kExitOk);
    for (const auto& name : {"scene_000.png", "scene_006_truth.png", "scene_031.json", "corpus.json"}) {
        EXPECT_EQ(io::read_file_bytes(a / name), io::read_file_bytes(b / name)) << name;
    }
    oracle::TempDir other("gen");
    ASSERT_EQ(cmd_gen({1, other.path()}, out, err), kExitOk);
    EXPECT_NE(io::read_file_bytes(a / "scene_000.png"), io::read_file_bytes(other / "scene_000.png"));
}

TEST(EvalCommand, HeSucceedsWhereBaselineFails) {
    oracle::TempDir dir("eval");
    EvalCommand c;
    c.corpus = shared_corpus();
    c.report = dir / "eval.json";
    std::ostringstream out, err;
    ASSERT_EQ(cmd_eval(c, out, err), kExitOk) << err.str();
    const Json j = load_json(*c.report);
    const auto& he = j["canonical"]["aggregate"]["he"];
    const auto& lum = j["canonical"]["aggregate"]["luminance"];
    EXPECT_GE(he["success_count"].get<int>(), 59);
    EXPECT_EQ(he["failures"], Json::array({6}));
    EXPECT_TRUE(he["unexpected_failures"].empty());
    EXPECT_GE(he["mean_dice_clean"].get<double>(), 0.95);
    EXPECT_EQ(lum["artefact_scenes"], 30);
    EXPECT_EQ(lum["artefact_scenes_all_artefacts_rejected"], 0);
    EXPECT_GE(lum["scenes_tissue_not_segmented"].get<int>(), 2);
    EXPECT_EQ(j["canonical"]["expected_failure_scenes"], Json::array({6}));
    EXPECT_EQ(j["canonical"]["acceptance"]["passed"], true);
    EXPECT_EQ(j["canonical"]["scenes"].size(), 60u);
}

TEST(EvalCommand, CanonicalSectionIsReproducible) {
    oracle::TempDir dir("eval");
    std::ostringstream out, err;
    EvalCommand c;
    c.corpus = shared_corpus();
    c.methods = {Method::he_representation};
    c.threads = 1;
    c.report = dir / "a.json";
    ASSERT_EQ(cmd_eval(c, out, err), kExitOk);
    c.threads = 3;
    c.report = dir / "b.json";
    ASSERT_EQ(cmd_eval(c, out, err), kExitOk);
    EXPECT_EQ(load_json(dir / "a.json")["canonical"].dump(), load_json(dir / "b.json")["canonical"].dump());
}

TEST(EvalCommand, TighterToleranceFailsWithExitOne) {
    oracle::TempDir dir("eval");
    std::ostringstream out, err;
    EvalCommand c;
    c.corpus = shared_corpus();
    c.methods = {Method::he_representation};
    c.tolerances.min_tissue_recall = 1.01;  // unattainable
    EXPECT_EQ(cmd_eval(c, out, err), kExitAcceptanceFailure);
    c.methods = {Method::luminance_baseline};
    EXPECT_EQ(cmd_eval(c, out, err), kExitOk);  // baseline never gates
}

TEST(EvalCommand, MissingFilesExitTwo) {
    oracle::TempDir dir("eval");
    std::ostringstream out, err;
    EvalCommand c;
    c.corpus = dir.path();
    EXPECT_EQ(cmd_eval(c, out, err), kExitUsage);  // empty
    c.corpus = dir / "absent";
    EXPECT_EQ(cmd_eval(c, out, err), kExitUsage);

    for (const auto& name : {"scene_003.json", "scene_003.png"}) {
        std::filesystem::copy_file(shared_corpus() / name, dir / name);
    }
    c.corpus = dir.path();
    EXPECT_EQ(cmd_eval(c, out, err), kExitUsage);  // no truth
    std::filesystem::copy_file(shared_corpus() / "scene_004_truth.png", dir / "scene_003_truth.png");
    EXPECT_EQ(cmd_eval(c, out, err), kExitUsage);  // wrong truth
    std::filesystem::copy_file(shared_corpus() / "scene_003_truth.png", dir / "scene_003_truth.png",
                               std::filesystem::copy_options::overwrite_existing);
    EXPECT_EQ(cmd_eval(c, out, err), kExitOk);
}

TEST(CubeCommand, ReportsLattice) {
    std::ostringstream out, err;
    ASSERT_EQ(cmd_cube({255, std::nullopt}, out, err), kExitOk);
    const Json j = Json::parse(out.str());
    EXPECT_EQ(j["canonical"]["count_nonzero"], 1);
    EXPECT_EQ(j["canonical"]["magenta_corner"]["on_lattice"], true);
    EXPECT_EQ(j["canonical"]["magenta_corner"]["value"], 1.0);
    EXPECT_EQ(cmd_cube({0, std::nullopt}, out, err), kExitUsage);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("--version"), 0);
    EXPECT_EQ(run_cli("cube --step 0"), 2);
    EXPECT_EQ(run_cli("cube --step 85"), 0);
    EXPECT_EQ(run_cli("segment /nonexistent.png --out /tmp/x.png"), 2);
    EXPECT_EQ(run_cli("segment --method nope a.png --out b.png"), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST(Cli, SegmentsThroughBinary) {
    oracle::TempDir dir("cli");
    io::write_png(dir / "in.png", synth::generate(scenes::clean()).image);
    const std::string in = (dir / "in.png").string(), out = (dir / "m.png").string();
    ASSERT_EQ(run_cli("segment " + in + " --out " + out + " --tiled --tile-size 64"), 0);
    EXPECT_EQ(io::read_mask_png(dir / "m.png").width(), 400u);
}
