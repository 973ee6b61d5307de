/*
 * facetrack - Pose, projection and shape-model geometry
 *
 * File: core/include/facetrack/geometry.hpp
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

#include "facetrack/wireframe.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace facetrack {

inline constexpr int kStateDims = 12;
using StateVector = Eigen::Matrix<double, kStateDims, 1>;

/// Points at or closer than this depth are not projected.
inline constexpr double kMinDepth = 1e-6;

struct CameraIntrinsics
{
    double focal_px = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    /// Principal point at the image centre, focal length equal to the image width.
    static CameraIntrinsics for_image(int width, int height);

    void validate() const;
};

/**
 * The tracked state: rotations (radians; rx tilt, ry pan, rz roll),
 * translation in model units (tz > 0 in front of the camera) and six
 * animation intensities. The scale is fixed once initialised.
 */
struct PoseAnimParams
{
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;
    double tx = 0.0;
    double ty = 0.0;
    double tz = 1.0;
    std::array<double, kNumAnimParams> anim{};
    double scale = 1.0;

    /// (rx, ry, rz, tx, ty, tz, anim0..anim5); scale is not part of the state.
    StateVector to_vector() const;
    static PoseAnimParams from_vector(const StateVector& v, double scale = 1.0);

    /// Copy with the rotations wrapped into (-pi, pi].
    PoseAnimParams normalized() const;

    /// Throws ValidationError unless all fields are finite and tz > 0.
    void validate() const;

    friend bool operator==(const PoseAnimParams&, const PoseAnimParams&) = default;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

double deg2rad(double degrees);
double rad2deg(double radians);

/// R = Rz(rz) * Ry(ry) * Rx(rx).
Eigen::Matrix3d rotation_matrix(double rx, double ry, double rz);

/// Inverse of rotation_matrix: (rx, ry, rz) with ry in [-pi/2, pi/2].
Eigen::Vector3d euler_angles(const Eigen::Matrix3d& rotation);

/**
 * g = R * s * (mean + S*sigma + A*alpha) + t for every vertex, where alpha
 * is b.anim scattered into the model's animation units via anim_selection.
 */
Points3 shape_instance(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b);

struct Projection
{
    Points2 pixels;
    Eigen::VectorXd depth;
    std::vector<bool> valid; ///< false when depth <= kMinDepth
};

/// Pinhole projection: u = cx + f*x/z, v = cy + f*y/z.
Projection project(const Points3& points, const CameraIntrinsics& cam);

/// shape_instance followed by project, restricted to the landmark vertices.
Projection landmark_positions(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                              const CameraIntrinsics& cam);

/// Deformed model-frame vertex (before rotation, scale and translation).
Eigen::Vector3d deformed_vertex(const WireframeModel& model, const Eigen::VectorXd& sigma,
                                const std::array<double, kNumAnimParams>& anim, int vertex);

} // namespace facetrack
