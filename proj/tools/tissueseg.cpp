// tissueseg: H&E tissue segmentation with artefact rejection.
//
//   tissueseg segment <image> --out mask.png [--method he|luminance] [--tiled] [--tile-size N] [--report r.json]
//   tissueseg gen --out dir [--master-seed N]
//   tissueseg eval --corpus dir [--methods he,luminance] [--report r.json]
//   tissueseg cube [--step N] [--report r.json]
//
// Exit codes: 0 success, 1 eval acceptance failure, 2 usage or I/O error.

#include <iostream>

#include <CLI11.hpp>

#include "tissueseg/commands.hpp"

namespace cli = tissueseg::cli;

int main(int argc, char** argv) {
    CLI::App app{"H&E tissue segmentation with pen-mark and scanning-artefact rejection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tissueseg::kToolVersion));

    unsigned threads = tissueseg::default_thread_count();
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    // segment
    cli::SegmentCommand seg;
    std::string method = "he";
    std::string seg_report;
    auto* segment = app.add_subcommand("segment", "Segment tissue in an RGB overview (PNG or binary PPM)");
    segment->add_option("input", seg.input, "Input image")->required();
    segment->add_option("--method", method, "he or luminance")->check(CLI::IsMember({"he", "luminance"}));
    segment->add_flag("--tiled", seg.tiled, "Two-pass tiled streaming");
    segment->add_option("--tile-size", seg.tile_size, "Tile edge in pixels (power of two)");
    segment->add_option("--out", seg.out, "Output mask PNG")->required();
    segment->add_option("--report", seg_report, "JSON report path");

    // gen
    cli::GenCommand gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write the 60-scene synthetic corpus");
    gen_cmd->add_option("--master-seed", gen.master_seed, "Corpus seed");
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    // eval
    cli::EvalCommand eval;
    std::string methods = "he,luminance";
    std::string eval_report;
    auto* eval_cmd = app.add_subcommand("eval", "Segment and score a corpus written by gen");
    eval_cmd->add_option("--corpus", eval.corpus, "Corpus directory")->required();
    eval_cmd->add_option("--methods", methods, "Comma-separated methods");
    eval_cmd->add_option("--report", eval_report, "JSON report path");
    eval_cmd->add_option("--min-tissue-recall", eval.tolerances.min_tissue_recall);
    eval_cmd->add_option("--max-background-leak", eval.tolerances.max_background_leak);
    eval_cmd->add_option("--max-bounding-box-leak", eval.tolerances.max_bounding_box_leak);
    eval_cmd->add_option("--max-artefact-leak", eval.tolerances.max_artefact_leak);

    // cube
    cli::CubeCommand cube;
    std::string cube_report;
    auto* cube_cmd = app.add_subcommand("cube", "Count RGB lattice colours with positive tissue representation");
    cube_cmd->add_option("--step", cube.step, "Lattice step per axis (1 = all 2^24 colours)");
    cube_cmd->add_option("--report", cube_report, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsage;
    }

    try {
        if (*segment) {
            seg.method = tissueseg::parse_method(method);
            seg.threads = threads;
            if (!seg_report.empty()) seg.report = seg_report;
            return cli::cmd_segment(seg);
        }
        if (*gen_cmd) return cli::cmd_gen(gen);
        if (*eval_cmd) {
            eval.methods.clear();
            for (const auto& m : cli::detail::split_csv(methods)) eval.methods.push_back(tissueseg::parse_method(m));
            eval.threads = threads;
            if (!eval_report.empty()) eval.report = eval_report;
            return cli::cmd_eval(eval);
        }
        if (*cube_cmd) {
            if (!cube_report.empty()) cube.report = cube_report;
            return cli::cmd_cube(cube);
        }
    } catch (const tissueseg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    return cli::kExitUsage;
}
