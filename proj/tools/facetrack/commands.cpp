/*
 * facetrack - Command-line front end
 *
 * File: tools/facetrack/commands.cpp
 *
 * Copyright 2026 The facetrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at:
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "facetrack/commands.hpp"

#include <facetrack/appearance.hpp>
#include <facetrack/config.hpp>
#include <facetrack/error.hpp>
#include <facetrack/eval.hpp>
#include <facetrack/image.hpp>
#include <facetrack/posit.hpp>
#include <facetrack/render.hpp>
#include <facetrack/synthetic.hpp>
#include <facetrack/tracker.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace facetrack::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions
{
    std::string config;
    std::vector<std::string> overrides;
    std::string frames;
    std::string out;
};

void add_common(CLI::App& cmd, CommonOptions& o, const std::string& frames_help, const std::string& out_help)
{
    cmd.add_option("--config", o.config, "JSON configuration file");
    cmd.add_option("--set", o.overrides, "Override a configuration key, e.g. tracker.alpha=0.2")
        ->type_name("KEY=VALUE");
    cmd.add_option("--frames", o.frames, frames_help);
    cmd.add_option("--out", o.out, out_help);
}

RunConfig load_config(const CommonOptions& o)
{
    return o.config.empty() ? default_config(o.overrides) : load_config_file(o.config, o.overrides);
}

std::vector<fs::path> frame_list(const std::string& dir)
{
    if (dir.empty()) throw ValidationError("--frames is required");
    auto frames = list_frames(dir);
    if (frames.empty()) throw ValidationError("no image frames in " + dir);
    return frames;
}

std::string require(const std::string& value, const std::string& what)
{
    if (value.empty()) throw ValidationError(what + " is required");
    return value;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& writer)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot write", path);
    writer(f);
    if (!f) throw IoError("write failed", path);
}

fs::path output_directory(const std::string& out)
{
    const fs::path dir = require(out, "--out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory", dir);
    return dir;
}

/// Either reads an init result file or runs initialisation from annotations.
InitResult obtain_init(const RunConfig& cfg, const std::string& init_flag, const std::string& annotations_flag,
                       const WireframeModel& model, const CameraIntrinsics& cam, std::ostream& err)
{
    const fs::path init_path = !init_flag.empty() ? fs::path(init_flag) : cfg.init_result;
    if (!init_path.empty()) {
        std::ifstream in(init_path);
        if (!in) throw IoError("cannot open init result", init_path);
        return read_init_result(in);
    }
    const fs::path ann = !annotations_flag.empty() ? fs::path(annotations_flag) : cfg.annotations;
    if (ann.empty()) throw ValidationError("need --init or --annotations (or paths.init_result / paths.annotations)");
    InitResult init = initialize(model, read_annotations_file(ann), cam, cfg.init);
    if (init.rmse_warning) {
        err << "warning: initial reprojection RMSE " << init.reproj_rmse << " px exceeds "
            << cfg.init.rmse_warning_px << " px\n";
    }
    return init;
}

int cmd_init(const CommonOptions& o, const std::string& annotations, std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = load_config(o);
    const auto frames = frame_list(o.frames);
    const fs::path out_path = require(o.out, "--out");
    const GrayImage frame0 = load_image(frames.front());
    const CameraIntrinsics cam = cfg.camera_for(frame0.cols, frame0.rows);
    const WireframeModel model = cfg.load_model();

    const fs::path ann = !annotations.empty() ? fs::path(annotations) : cfg.annotations;
    if (ann.empty()) throw ValidationError("--annotations (or paths.annotations) is required");
    const InitResult init = initialize(model, read_annotations_file(ann), cam, cfg.init);
    if (init.rmse_warning) {
        err << "warning: initial reprojection RMSE " << init.reproj_rmse << " px exceeds " << cfg.init.rmse_warning_px
            << " px\n";
    }
    write_text(out_path, [&](std::ostream& f) { write_init_result(f, init); });
    out << "initialised from " << frames.front().filename().string() << ": reprojection RMSE " << init.reproj_rmse
        << " px, written to " << out_path.string() << '\n';
    return kOk;
}

int cmd_render_db(const CommonOptions& o, const std::string& init_flag, const std::string& annotations,
                  std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = load_config(o);
    const auto frames = frame_list(o.frames);
    const fs::path dir = output_directory(o.out);
    const GrayImage frame0 = load_image(frames.front());
    const CameraIntrinsics cam = cfg.camera_for(frame0.cols, frame0.rows);
    const WireframeModel model = cfg.load_model();
    const InitResult init = obtain_init(cfg, init_flag, annotations, model, cam, err);

    const TexturedModel tm = extract_texture(frame0, model, init, cam);
    const auto grid = pose_grid(cfg.tracker.grid_lo, cfg.tracker.grid_hi, cfg.tracker.grid_step);
    const auto views = generate_database(tm, grid, init.b0, cam);
    write_database(dir, views);
    out << views.size() << " views written to " << dir.string() << '\n';
    return kOk;
}

int cmd_track(const CommonOptions& o, const std::string& init_flag, const std::string& annotations,
              std::ostream& out, std::ostream& err)
{
    const RunConfig cfg = load_config(o);
    const auto frames = frame_list(o.frames);
    const fs::path dir = output_directory(o.out);
    const GrayImage frame0 = load_image(frames.front());
    const CameraIntrinsics cam = cfg.camera_for(frame0.cols, frame0.rows);
    const WireframeModel model = cfg.load_model();
    const InitResult init = obtain_init(cfg, init_flag, annotations, model, cam, err);
    write_text(dir / "init.json", [&](std::ostream& f) { write_init_result(f, init); });

    SequenceTracker tracker(model, init, cam, cfg.tracker);
    Trajectory traj;
    traj.frames.push_back(tracker.start(frame0, frames.front().stem().string()));
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const GrayImage frame = load_image(frames[i]);
        try {
            traj.frames.push_back(tracker.step(frame, frames[i].stem().string()));
        } catch (const TrackingLostError& e) {
            traj.lost_frame = static_cast<int>(i);
            err << "error: " << e.what() << " (" << frames[i].filename().string() << "); partial trajectory kept\n";
            break;
        }
    }
    write_trajectory_file(dir / "trajectory.csv", traj);
    save_appearance_file(dir / "appearance.bin", tracker.state().appearance);
    out << traj.frames.size() << " of " << frames.size() << " frames tracked, written to " << dir.string() << '\n';
    return traj.lost_frame ? kRuntime : kOk;
}

int cmd_eval(const CommonOptions& o, const std::string& trajectory, const std::string& gt_flag,
             const std::string& pts_flag, std::ostream& out)
{
    const RunConfig cfg = load_config(o);
    const Trajectory traj = read_trajectory_file(require(trajectory, "--trajectory"));
    if (!o.frames.empty()) {
        const auto frames = frame_list(o.frames);
        if (frames.size() != traj.frames.size()) {
            throw ValidationError("trajectory has " + std::to_string(traj.frames.size()) + " rows but " + o.frames +
                                  " has " + std::to_string(frames.size()) + " frames");
        }
    }
    const fs::path gt_path = !gt_flag.empty() ? fs::path(gt_flag) : cfg.ground_truth;
    if (gt_path.empty()) throw ValidationError("--gt (or paths.ground_truth) is required");
    MetricsReport report = buft_metrics(traj, parse_buft_gt_file(gt_path), cfg.lost_threshold);

    const fs::path pts = !pts_flag.empty() ? fs::path(pts_flag) : cfg.landmark_truth;
    if (!pts.empty()) {
        LandmarkGT lgt = parse_pts_sequence(pts);
        if (!cfg.subset_map.empty()) lgt.subset_map = cfg.subset_map;
        report.rms = rms_error(traj, lgt);
        double sum = 0.0;
        for (const double r : report.rms) sum += r;
        report.mean_rms = report.rms.empty() ? 0.0 : sum / static_cast<double>(report.rms.size());
    }
    out << format_report_table(report);
    if (!o.out.empty()) write_text(o.out, [&](std::ostream& f) { write_report_json(f, report); });
    return kOk;
}

int cmd_synth(const CommonOptions& o, int count, std::ostream& out)
{
    const RunConfig cfg = load_config(o);
    const fs::path dir = output_directory(o.out);
    const WireframeModel model = cfg.load_model();
    SyntheticMotion motion;
    motion.frames = count;
    const SyntheticSequence seq = make_sequence(model, motion);

    const fs::path frame_dir = dir / "frames";
    fs::create_directories(frame_dir);
    PoseGT gt;
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.png", t);
        save_image(frame_dir / name, seq.frames[t]);
        const auto& b = seq.truth[t];
        const PoseAngles a = angles_of(b);
        gt.push_back({b.tx, b.ty, b.tz, a.roll, a.pan, a.tilt});
    }
    write_text(dir / "annotations.txt", [&](std::ostream& f) { write_annotations(f, seq.annotations); });
    write_text(dir / "pose_gt.txt", [&](std::ostream& f) { write_buft_gt(f, gt); });
    out << seq.frames.size() << " synthetic frames written to " << frame_dir.string() << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Model-based head pose and facial animation tracking", "facetrack"};
    app.require_subcommand(1);

    CommonOptions init_o, db_o, track_o, eval_o, synth_o;
    std::string annotations, init_file, trajectory, gt, pts;
    int count = 60;

    auto* init = app.add_subcommand("init", "Estimate the initial pose from frame-0 annotations");
    add_common(*init, init_o, "Directory of frames (the first is used)", "Init result JSON to write");
    init->add_option("--annotations", annotations, "Frame-0 landmark annotations (ordinal u v per line)");

    auto* db = app.add_subcommand("render-db", "Render the synthetic pose database from frame 0");
    add_common(*db, db_o, "Directory of frames (the first is used)", "Output directory");
    db->add_option("--init", init_file, "Init result JSON");
    db->add_option("--annotations", annotations, "Annotations, used when no init result is given");

    auto* track = app.add_subcommand("track", "Track a frame sequence");
    add_common(*track, track_o, "Directory of frames", "Output directory");
    track->add_option("--init", init_file, "Init result JSON");
    track->add_option("--annotations", annotations, "Annotations, used when no init result is given");

    auto* eval = app.add_subcommand("eval", "Score a trajectory against ground truth");
    add_common(*eval, eval_o, "Optional frame directory to check the row count", "Report JSON to write");
    eval->add_option("--trajectory", trajectory, "Trajectory CSV");
    eval->add_option("--gt", gt, "Pose ground truth (6 columns per frame)");
    eval->add_option("--pts", pts, "Directory of 68-point .pts files");

    auto* synth = app.add_subcommand("synth", "Write a synthetic test sequence with ground truth");
    add_common(*synth, synth_o, "Unused", "Output directory");
    synth->add_option("--count", count, "Number of frames")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (init->parsed()) return cmd_init(init_o, annotations, out, err);
        if (db->parsed()) return cmd_render_db(db_o, init_file, annotations, out, err);
        if (track->parsed()) return cmd_track(track_o, init_file, annotations, out, err);
        if (eval->parsed()) return cmd_eval(eval_o, trajectory, gt, pts, out);
        if (synth->parsed()) return cmd_synth(synth_o, count, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const RankError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const TrackingLostError& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kValidation;
}

} // namespace facetrack::cli
