/*
 * facetrack - Pose-tracking evaluation metrics and reports
 *
 * File: core/include/facetrack/eval.hpp
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

#include "facetrack/render.hpp"
#include "facetrack/tracker.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace facetrack {

/// One ground-truth pose line: position, depth and the three angles in degrees.
struct PoseRecord
{
    double x_pos = 0.0;
    double y_pos = 0.0;
    double depth = 0.0;
    double roll = 0.0;
    double pan = 0.0;
    double tilt = 0.0;

    PoseAngles angles() const { return {pan, tilt, roll}; }
};

using PoseGT = std::vector<PoseRecord>;

/// Pan, tilt and roll of a tracked state in degrees.
PoseAngles angles_of(const PoseAnimParams& b);

/// Squared Euclidean distance between (pan, tilt, roll) triples, in deg^2.
double rotation_error(const PoseAngles& theta, const PoseAngles& theta_hat);

inline constexpr double kDefaultLostThreshold = 400.0;

struct MetricsReport
{
    double lost_threshold = kDefaultLostThreshold;
    int total = 0;
    int n_s = 0;
    double p_s = 0.0; ///< percent of frames with e_i <= lost_threshold
    double e_pan = 0.0;
    double e_tilt = 0.0;
    double e_roll = 0.0;
    double e_m = 0.0;
    double sd_pan = 0.0; ///< sample standard deviations of the absolute errors
    double sd_tilt = 0.0;
    double sd_roll = 0.0;
    std::vector<double> errors;     ///< e_i per frame
    std::vector<double> rms;        ///< landmark RMS per frame, empty without landmark ground truth
    double mean_rms = 0.0;
};

/**
 * Robustness and accuracy over a sequence. Tracked frames are those with
 * e_i <= lost_threshold; the MAEs average over tracked frames only and are
 * NaN when none are tracked. Throws ValidationError on length mismatch.
 */
MetricsReport buft_metrics(const std::vector<PoseAngles>& estimate, const std::vector<PoseAngles>& truth,
                           double lost_threshold = kDefaultLostThreshold);
MetricsReport buft_metrics(const Trajectory& trajectory, const PoseGT& gt,
                           double lost_threshold = kDefaultLostThreshold);

/// Annotated 2D points per frame plus (annotation index, tracker ordinal) pairs.
struct LandmarkGT
{
    std::vector<Points2> frames;
    std::vector<std::pair<int, int>> subset_map;
};

/// Twelve eye, nose and mouth points of the 68-point annotation scheme.
std::vector<std::pair<int, int>> default_subset_map();

/// sqrt(mean squared distance) over the mapped pairs, per frame.
std::vector<double> rms_error(const std::vector<Points2>& estimate, const LandmarkGT& gt);
std::vector<double> rms_error(const Trajectory& trajectory, const LandmarkGT& gt);

/// Whitespace-separated x_pos y_pos depth roll pan tilt per line; '#' comments.
PoseGT parse_buft_gt(std::istream& in);
PoseGT parse_buft_gt_file(const std::filesystem::path& path);
void write_buft_gt(std::ostream& out, const PoseGT& gt);

/// "version: 1", "n_points: N", "{", N coordinate lines, "}".
Points2 parse_pts(std::istream& in);
Points2 parse_pts_file(const std::filesystem::path& path);
void write_pts(std::ostream& out, const Points2& points);
/// Every *.pts in a directory, in file name order.
LandmarkGT parse_pts_sequence(const std::filesystem::path& directory);

void write_report_json(std::ostream& out, const MetricsReport& report);
/// P_s, E_pan, E_tilt, E_roll, E_avg as a text table.
std::string format_report_table(const MetricsReport& report, const std::string& label = "facetrack");

} // namespace facetrack
