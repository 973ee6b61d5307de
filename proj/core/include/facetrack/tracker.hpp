/*
 * facetrack - Frame-to-frame head tracker
 *
 * File: core/include/facetrack/tracker.hpp
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

#pragma once

#include "facetrack/appearance.hpp"
#include "facetrack/descriptor.hpp"
#include "facetrack/geometry.hpp"
#include "facetrack/optimizer.hpp"
#include "facetrack/posit.hpp"
#include "facetrack/render.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace facetrack {

/// Diagonal of the random-walk covariance of the state between frames.
struct EvolutionPrior
{
    StateVector psi = StateVector::Ones();

    /**
     * (3 deg, 3 deg, 2 deg)^2 for (rx, ry, rz) in radians^2, the translation
     * moving a point at depth tz by 5 pixels squared for tx and ty,
     * (0.02 tz)^2 for tz and 0.1^2 for each animation intensity.
     */
    static EvolutionPrior defaults_for(double tz, double focal_px);
    void validate() const;
};

struct TrackerConfig
{
    /// Empty means EvolutionPrior::defaults_for at the initial pose.
    std::optional<EvolutionPrior> prior;
    /// Empty init_spread means sqrt(psi).
    SimplexConfig simplex;
    int restarts = 0;      ///< extra simplex runs per frame, each seeded at the previous best
    int min_visible = 6;   ///< below this the energy is infinite
    double patch_scale_factor = 0.4;
    double grid_lo = -30.0;
    double grid_hi = 30.0;
    double grid_step = 10.0;
    double alpha = 0.1;
    double ridge = 1e-4;
    bool parallel = true;

    void validate() const;
};

struct TrackerState
{
    PoseAnimParams b_hat;
    AppearanceModel appearance;
    int frame_index = 0;
    double last_energy = 0.0;
};

struct FrameResult
{
    std::string frame_id;
    PoseAnimParams b;
    Points2 landmarks;
    std::vector<bool> visibility;
    double energy = 0.0;
    int n_visible = 0;
    StopReason status = StopReason::IterationLimit;
    int iterations = 0;
};

/// Every candidate state had too few visible landmarks.
class TrackingLostError : public Error
{
public:
    TrackingLostError(TrackerState last_good, int frame_index)
        : Error("tracking lost at frame " + std::to_string(frame_index)), state_(std::move(last_good)),
          frame_index_(frame_index)
    {
    }
    const TrackerState& last_good_state() const noexcept { return state_; }
    int frame_index() const noexcept { return frame_index_; }

private:
    TrackerState state_;
    int frame_index_;
};

/// Landmark pixels and visibility of the mesh posed at b.
struct PosedLandmarks
{
    Points2 pixels;
    std::vector<bool> visibility;
};

PosedLandmarks posed_landmarks(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                               const CameraIntrinsics& cam);

/// Everything the energy needs besides the candidate state. Read-only during a frame.
struct EnergyContext
{
    const GrayImage* frame = nullptr;
    const WireframeModel* model = nullptr;
    const Eigen::VectorXd* sigma = nullptr;
    const AppearanceModel* appearance = nullptr;
    const CameraIntrinsics* cam = nullptr;
    PoseAnimParams prior_b;
    StateVector psi = StateVector::Ones();
    double patch_scale = 0.0;
    int min_visible = 6;
};

struct EnergyTerms
{
    double data = 0.0;  ///< sum of visible Mahalanobis distances times n / n_visible
    double prior = 0.0; ///< sum of (b - prior_b)^2 / psi, angle differences wrapped
    int n_visible = 0;

    /// data + prior, or +infinity when fewer than min_visible landmarks are visible.
    double total(int min_visible) const;
};

EnergyTerms energy_terms(const PoseAnimParams& b, const EnergyContext& ctx);
double energy(const PoseAnimParams& b, const EnergyContext& ctx);

/// Convenience form with the patch scale taken from prior_b.
double energy(const PoseAnimParams& b, const GrayImage& frame, const WireframeModel& model,
              const Eigen::VectorXd& sigma, const AppearanceModel& appearance, const PoseAnimParams& prior_b,
              const StateVector& psi, const CameraIntrinsics& cam, double patch_scale_factor = 0.4,
              int min_visible = 6);

/// The prior after filling the TrackerConfig defaults for this initial pose.
EvolutionPrior resolve_prior(const TrackerConfig& cfg, const PoseAnimParams& b0, const CameraIntrinsics& cam);
/// The simplex configuration after filling the init_spread default.
SimplexConfig resolve_simplex(const TrackerConfig& cfg, const EvolutionPrior& prior);

/**
 * One tracking step: minimise the energy around state.b_hat, then adapt
 * the appearance model with the observation at the optimum.
 * Throws TrackingLostError when every simplex vertex is infeasible.
 */
std::pair<TrackerState, FrameResult> track_frame(const TrackerState& state, const GrayImage& frame,
                                                 const WireframeModel& model, const Eigen::VectorXd& sigma,
                                                 const CameraIntrinsics& cam, const EvolutionPrior& prior,
                                                 const TrackerConfig& cfg);

/// Per-landmark descriptor samples from the rendered views (visible landmarks only).
std::vector<std::vector<Descriptor>> database_samples(const std::vector<RenderedView>& views,
                                                      double patch_scale_factor);

/// Texture from frame 0, render the pose grid, train one Gaussian per landmark.
AppearanceModel learn_appearance(const GrayImage& frame0, const WireframeModel& model, const InitResult& init,
                                 const CameraIntrinsics& cam, const TrackerConfig& cfg);

struct Trajectory
{
    std::vector<FrameResult> frames;
    std::optional<int> lost_frame; ///< index of the frame at which tracking was lost
};

/// Stateful front end for frame-by-frame tracking.
class SequenceTracker
{
public:
    SequenceTracker(WireframeModel model, InitResult init, CameraIntrinsics cam, TrackerConfig cfg);

    /// Learns the appearance from frame 0 and returns the initial-pose result.
    FrameResult start(const GrayImage& frame0, std::string frame_id = {});
    /// Tracks the next frame. Throws TrackingLostError.
    FrameResult step(const GrayImage& frame, std::string frame_id = {});

    const TrackerState& state() const noexcept { return state_; }
    const EvolutionPrior& prior() const noexcept { return prior_; }

private:
    WireframeModel model_;
    InitResult init_;
    CameraIntrinsics cam_;
    TrackerConfig cfg_;
    EvolutionPrior prior_;
    TrackerState state_;
    bool started_ = false;
};

/// Tracks frames[1..] from the initial pose on frames[0]. Tracking loss ends
/// the trajectory early and sets lost_frame.
Trajectory track_sequence(const std::vector<GrayImage>& frames, const WireframeModel& model, const InitResult& init,
                          const CameraIntrinsics& cam, const TrackerConfig& cfg,
                          const std::vector<std::string>& frame_ids = {});

/**
 * CSV with a header row, one row per frame: frame_id, rx, ry, rz (degrees),
 * tx, ty, tz, anim1..anim6, energy, n_visible, then u,v for each of the 26
 * landmarks.
 */
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_file(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory_file(const std::filesystem::path& path);

} // namespace facetrack
