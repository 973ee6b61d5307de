/*
 * facetrack - Frame-to-frame head tracker
 *
 * File: core/src/tracker.cpp
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

#include "facetrack/tracker.hpp"

#include "facetrack/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace facetrack {

namespace {

constexpr int kCsvFixedColumns = 1 + kStateDims + 2;

void check_context(const EnergyContext& ctx)
{
    if (!ctx.frame || !ctx.model || !ctx.sigma || !ctx.appearance || !ctx.cam) {
        throw ValidationError("energy context is incomplete");
    }
    if (ctx.appearance->gaussians.size() != ctx.model->landmark_indices.size()) {
        throw ValidationError("appearance model and wireframe disagree on the landmark count");
    }
}

} // namespace

EvolutionPrior EvolutionPrior::defaults_for(double tz, double focal_px)
{
    if (!(tz > 0.0) || !(focal_px > 0.0)) throw ValidationError("prior defaults need tz > 0 and focal > 0");
    EvolutionPrior p;
    const double t_xy = 5.0 * tz / focal_px;
    p.psi << std::pow(deg2rad(3.0), 2), std::pow(deg2rad(3.0), 2), std::pow(deg2rad(2.0), 2), t_xy * t_xy,
        t_xy * t_xy, std::pow(0.02 * tz, 2), 0.01, 0.01, 0.01, 0.01, 0.01, 0.01;
    return p;
}

void EvolutionPrior::validate() const
{
    if (!psi.allFinite() || psi.minCoeff() <= 0.0) throw ValidationError("prior variances must be positive");
}

void TrackerConfig::validate() const
{
    if (prior) prior->validate();
    if (simplex.init_spread.size() != 0) {
        if (simplex.init_spread.size() != kStateDims) throw ValidationError("init_spread must have 12 entries");
        simplex.validate();
    }
    if (simplex.max_iters < 0) throw ValidationError("max_iters must be non-negative");
    if (restarts < 0) throw ValidationError("restarts must be non-negative");
    if (min_visible < 1) throw ValidationError("min_visible must be positive");
    if (!(patch_scale_factor > 0.0)) throw ValidationError("patch_scale_factor must be positive");
    check_forgetting_factor(alpha);
    if (!(ridge >= 0.0)) throw ValidationError("ridge must be non-negative");
    pose_grid(grid_lo, grid_hi, grid_step);
}

PosedLandmarks posed_landmarks(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                               const CameraIntrinsics& cam)
{
    const Points3 vertices = shape_instance(model, sigma, b);
    const Projection proj = project(vertices, cam);
    PosedLandmarks out;
    out.pixels.resize(static_cast<Eigen::Index>(model.landmark_indices.size()), 2);
    for (std::size_t k = 0; k < model.landmark_indices.size(); ++k) {
        out.pixels.row(static_cast<Eigen::Index>(k)) = proj.pixels.row(model.landmark_indices[k]);
    }
    out.visibility = landmark_visibility(model, vertices, proj, cam, kVisibilityDepthEps * b.tz);
    return out;
}

double EnergyTerms::total(int min_visible) const
{
    if (n_visible < min_visible) return std::numeric_limits<double>::infinity();
    return data + prior;
}

EnergyTerms energy_terms(const PoseAnimParams& b, const EnergyContext& ctx)
{
    check_context(ctx);
    EnergyTerms terms;

    const StateVector x = b.to_vector();
    const StateVector x_prior = ctx.prior_b.to_vector();
    for (int j = 0; j < kStateDims; ++j) {
        const double d = j < 3 ? normalize_angle(x(j) - x_prior(j)) : x(j) - x_prior(j);
        terms.prior += d * d / ctx.psi(j);
    }

    if (!(b.tz > kMinDepth) || !x.allFinite()) return terms;
    const PosedLandmarks posed = posed_landmarks(*ctx.model, *ctx.sigma, b, *ctx.cam);
    const FrameObservation obs = observe(*ctx.frame, posed.pixels, posed.visibility, ctx.patch_scale);
    terms.n_visible = obs.num_visible();
    if (terms.n_visible == 0) return terms;

    double sum = 0.0;
    for (std::size_t i = 0; i < obs.descriptors.size(); ++i) {
        if (obs.visibility[i]) sum += mahalanobis(ctx.appearance->gaussians[i], obs.descriptors[i]);
    }
    terms.data = sum * static_cast<double>(obs.descriptors.size()) / terms.n_visible;
    return terms;
}

double energy(const PoseAnimParams& b, const EnergyContext& ctx)
{
    return energy_terms(b, ctx).total(ctx.min_visible);
}

double energy(const PoseAnimParams& b, const GrayImage& frame, const WireframeModel& model,
              const Eigen::VectorXd& sigma, const AppearanceModel& appearance, const PoseAnimParams& prior_b,
              const StateVector& psi, const CameraIntrinsics& cam, double patch_scale_factor, int min_visible)
{
    EnergyContext ctx{&frame, &model, &sigma, &appearance, &cam, prior_b, psi, 0.0, min_visible};
    const PosedLandmarks prior_pose = posed_landmarks(model, sigma, prior_b, cam);
    ctx.patch_scale = patch_scale_for(prior_pose.pixels, patch_scale_factor);
    return energy(b, ctx);
}

EvolutionPrior resolve_prior(const TrackerConfig& cfg, const PoseAnimParams& b0, const CameraIntrinsics& cam)
{
    EvolutionPrior prior = cfg.prior ? *cfg.prior : EvolutionPrior::defaults_for(b0.tz, cam.focal_px);
    prior.validate();
    return prior;
}

SimplexConfig resolve_simplex(const TrackerConfig& cfg, const EvolutionPrior& prior)
{
    SimplexConfig sc = cfg.simplex;
    if (sc.init_spread.size() == 0) sc.init_spread = prior.psi.cwiseSqrt();
    sc.validate();
    return sc;
}

std::pair<TrackerState, FrameResult> track_frame(const TrackerState& state, const GrayImage& frame,
                                                 const WireframeModel& model, const Eigen::VectorXd& sigma,
                                                 const CameraIntrinsics& cam, const EvolutionPrior& prior,
                                                 const TrackerConfig& cfg)
{
    state.b_hat.validate();
    EnergyContext ctx{&frame, &model, &sigma, &state.appearance, &cam, state.b_hat, prior.psi, 0.0,
                      cfg.min_visible};
    const PosedLandmarks previous = posed_landmarks(model, sigma, state.b_hat, cam);
    ctx.patch_scale = patch_scale_for(previous.pixels, cfg.patch_scale_factor);

    const double scale = state.b_hat.scale;
    const Objective objective = [&](const Eigen::VectorXd& x) {
        return energy(PoseAnimParams::from_vector(x, scale), ctx);
    };

    SimplexConfig sc = resolve_simplex(cfg, prior);
    const int frame_index = state.frame_index + 1;
    sc.rng_seed = cfg.simplex.rng_seed + static_cast<std::uint64_t>(frame_index);

    SimplexResult best = nelder_mead(objective, state.b_hat.to_vector(), sc, cfg.parallel);
    if (best.status == StopReason::Infeasible) throw TrackingLostError(state, frame_index);
    for (int r = 0; r < cfg.restarts; ++r) {
        sc.rng_seed += 0x9e3779b97f4a7c15ULL;
        SimplexResult again = nelder_mead(objective, best.x, sc, cfg.parallel);
        again.iterations += best.iterations;
        if (again.f <= best.f) best = std::move(again);
    }

    TrackerState next;
    next.b_hat = PoseAnimParams::from_vector(best.x, scale).normalized();
    next.frame_index = frame_index;
    next.last_energy = best.f;
    next.appearance = state.appearance;

    const PosedLandmarks posed = posed_landmarks(model, sigma, next.b_hat, cam);
    FrameObservation obs = observe(frame, posed.pixels, posed.visibility, ctx.patch_scale);
    update(next.appearance, obs);

    FrameResult result;
    result.b = next.b_hat;
    result.landmarks = posed.pixels;
    result.visibility = obs.visibility;
    result.n_visible = obs.num_visible();
    result.energy = best.f;
    result.status = best.status;
    result.iterations = best.iterations;
    return {std::move(next), std::move(result)};
}

std::vector<std::vector<Descriptor>> database_samples(const std::vector<RenderedView>& views,
                                                      double patch_scale_factor)
{
    std::vector<std::vector<Descriptor>> samples(kNumLandmarks);
    for (const auto& view : views) {
        if (view.landmarks.rows() != kNumLandmarks) throw ValidationError("database view has the wrong landmark count");
        const FrameObservation obs =
            observe(view.image, view.landmarks, view.visibility, patch_scale_for(view.landmarks, patch_scale_factor));
        for (std::size_t i = 0; i < obs.descriptors.size(); ++i) {
            if (obs.visibility[i]) samples[i].push_back(obs.descriptors[i]);
        }
    }
    return samples;
}

AppearanceModel learn_appearance(const GrayImage& frame0, const WireframeModel& model, const InitResult& init,
                                 const CameraIntrinsics& cam, const TrackerConfig& cfg)
{
    const TexturedModel tm = extract_texture(frame0, model, init, cam);
    const auto grid = pose_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_step);
    const auto views = generate_database(tm, grid, init.b0, cam);
    return train(database_samples(views, cfg.patch_scale_factor), cfg.alpha, cfg.ridge);
}

SequenceTracker::SequenceTracker(WireframeModel model, InitResult init, CameraIntrinsics cam, TrackerConfig cfg)
    : model_(std::move(model)), init_(std::move(init)), cam_(cam), cfg_(std::move(cfg))
{
    cam_.validate();
    cfg_.validate();
    init_.b0.validate();
    prior_ = resolve_prior(cfg_, init_.b0, cam_);
    resolve_simplex(cfg_, prior_);
}

FrameResult SequenceTracker::start(const GrayImage& frame0, std::string frame_id)
{
    if (frame0.cols != cam_.width || frame0.rows != cam_.height) {
        throw ValidationError("frame size does not match the camera");
    }
    state_ = TrackerState{};
    state_.b_hat = init_.b0;
    state_.appearance = learn_appearance(frame0, model_, init_, cam_, cfg_);
    state_.frame_index = 0;

    EnergyContext ctx{&frame0, &model_, &init_.sigma0, &state_.appearance, &cam_, init_.b0, prior_.psi, 0.0,
                      cfg_.min_visible};
    const PosedLandmarks posed = posed_landmarks(model_, init_.sigma0, init_.b0, cam_);
    ctx.patch_scale = patch_scale_for(posed.pixels, cfg_.patch_scale_factor);
    const EnergyTerms terms = energy_terms(init_.b0, ctx);
    state_.last_energy = terms.total(cfg_.min_visible);
    started_ = true;

    FrameResult r;
    r.frame_id = std::move(frame_id);
    r.b = init_.b0;
    r.landmarks = posed.pixels;
    r.visibility = posed.visibility;
    r.n_visible = terms.n_visible;
    r.energy = state_.last_energy;
    r.status = StopReason::FunctionSpread;
    return r;
}

FrameResult SequenceTracker::step(const GrayImage& frame, std::string frame_id)
{
    if (!started_) throw ValidationError("SequenceTracker::step before start");
    if (frame.cols != cam_.width || frame.rows != cam_.height) {
        throw ValidationError("frame size does not match the camera");
    }
    auto [next, result] = track_frame(state_, frame, model_, init_.sigma0, cam_, prior_, cfg_);
    state_ = std::move(next);
    result.frame_id = std::move(frame_id);
    return result;
}

Trajectory track_sequence(const std::vector<GrayImage>& frames, const WireframeModel& model, const InitResult& init,
                          const CameraIntrinsics& cam, const TrackerConfig& cfg,
                          const std::vector<std::string>& frame_ids)
{
    if (frames.empty()) throw ValidationError("no frames to track");
    if (!frame_ids.empty() && frame_ids.size() != frames.size()) {
        throw ValidationError("frame id count differs from frame count");
    }
    auto id = [&](std::size_t i) { return frame_ids.empty() ? std::to_string(i) : frame_ids[i]; };

    SequenceTracker tracker(model, init, cam, cfg);
    Trajectory traj;
    traj.frames.push_back(tracker.start(frames.front(), id(0)));
    for (std::size_t i = 1; i < frames.size(); ++i) {
        try {
            traj.frames.push_back(tracker.step(frames[i], id(i)));
        } catch (const TrackingLostError&) {
            traj.lost_frame = static_cast<int>(i);
            break;
        }
    }
    return traj;
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory)
{
    out << "frame_id,rx_deg,ry_deg,rz_deg,tx,ty,tz";
    for (int a = 1; a <= kNumAnimParams; ++a) out << ",anim" << a;
    out << ",energy,n_visible";
    for (int k = 0; k < kNumLandmarks; ++k) out << ",u" << k << ",v" << k;
    out << '\n';

    const auto old_precision = out.precision(17);
    for (const auto& f : trajectory.frames) {
        if (f.frame_id.find_first_of(",\n") != std::string::npos) {
            throw ValidationError("frame id contains a comma or newline: " + f.frame_id);
        }
        out << f.frame_id << ',' << rad2deg(f.b.rx) << ',' << rad2deg(f.b.ry) << ',' << rad2deg(f.b.rz) << ','
            << f.b.tx << ',' << f.b.ty << ',' << f.b.tz;
        for (const double a : f.b.anim) out << ',' << a;
        out << ',' << f.energy << ',' << f.n_visible;
        for (int k = 0; k < kNumLandmarks; ++k) {
            if (k < f.landmarks.rows()) {
                out << ',' << f.landmarks(k, 0) << ',' << f.landmarks(k, 1);
            } else {
                out << ",nan,nan";
            }
        }
        out << '\n';
    }
    out.precision(old_precision);
}

void write_trajectory_file(const std::filesystem::path& path, const Trajectory& trajectory)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectory", path);
    write_trajectory(out, trajectory);
    if (!out) throw IoError("write failed", path);
}

namespace {

double parse_field(const std::string& field, std::size_t line)
{
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "nan" || field == "-nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ParseError("bad number '" + field + "'", line);
    return v;
}

} // namespace

Trajectory read_trajectory(std::istream& in)
{
    Trajectory traj;
    std::string text;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty()) continue;
        if (header) {
            header = false;
            if (text.rfind("frame_id", 0) != 0) throw ParseError("missing trajectory header", line_no);
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(text);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        const std::size_t expected = kCsvFixedColumns + 2 * kNumLandmarks;
        if (fields.size() != expected) {
            throw ParseError("expected " + std::to_string(expected) + " columns, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        FrameResult f;
        f.frame_id = fields[0];
        f.b.rx = deg2rad(parse_field(fields[1], line_no));
        f.b.ry = deg2rad(parse_field(fields[2], line_no));
        f.b.rz = deg2rad(parse_field(fields[3], line_no));
        f.b.tx = parse_field(fields[4], line_no);
        f.b.ty = parse_field(fields[5], line_no);
        f.b.tz = parse_field(fields[6], line_no);
        for (int a = 0; a < kNumAnimParams; ++a) {
            f.b.anim[static_cast<std::size_t>(a)] = parse_field(fields[7 + static_cast<std::size_t>(a)], line_no);
        }
        f.energy = parse_field(fields[13], line_no);
        f.n_visible = static_cast<int>(parse_field(fields[14], line_no));
        f.landmarks.resize(kNumLandmarks, 2);
        for (int k = 0; k < kNumLandmarks; ++k) {
            const auto base = static_cast<std::size_t>(kCsvFixedColumns + 2 * k);
            f.landmarks(k, 0) = parse_field(fields[base], line_no);
            f.landmarks(k, 1) = parse_field(fields[base + 1], line_no);
        }
        traj.frames.push_back(std::move(f));
    }
    if (header) throw ParseError("empty trajectory", line_no == 0 ? 1 : line_no);
    return traj;
}

Trajectory read_trajectory_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory", path);
    return read_trajectory(in);
}

} // namespace facetrack
