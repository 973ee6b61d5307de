/*
 * facetrack - Pose, projection and shape-model geometry
 *
 * File: core/src/geometry.cpp
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

#include "facetrack/geometry.hpp"

#include "facetrack/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace facetrack {

CameraIntrinsics CameraIntrinsics::for_image(int width, int height)
{
    return {static_cast<double>(width), 0.5 * (width - 1), 0.5 * (height - 1), width, height};
}

void CameraIntrinsics::validate() const
{
    if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
        throw ValidationError("camera focal length must be positive");
    }
    if (width <= 0 || height <= 0) {
        throw ValidationError("camera image size must be positive");
    }
    if (!(cx >= 0.0 && cx <= width - 1.0 && cy >= 0.0 && cy <= height - 1.0)) {
        throw ValidationError("principal point (" + std::to_string(cx) + ", " + std::to_string(cy) +
                              ") outside the image");
    }
}

StateVector PoseAnimParams::to_vector() const
{
    StateVector v;
    v << rx, ry, rz, tx, ty, tz, anim[0], anim[1], anim[2], anim[3], anim[4], anim[5];
    return v;
}

PoseAnimParams PoseAnimParams::from_vector(const StateVector& v, double scale)
{
    PoseAnimParams b;
    b.rx = v(0);
    b.ry = v(1);
    b.rz = v(2);
    b.tx = v(3);
    b.ty = v(4);
    b.tz = v(5);
    for (int k = 0; k < kNumAnimParams; ++k) {
        b.anim[static_cast<std::size_t>(k)] = v(6 + k);
    }
    b.scale = scale;
    return b;
}

PoseAnimParams PoseAnimParams::normalized() const
{
    auto out = *this;
    out.rx = normalize_angle(rx);
    out.ry = normalize_angle(ry);
    out.rz = normalize_angle(rz);
    return out;
}

void PoseAnimParams::validate() const
{
    if (!to_vector().allFinite() || !std::isfinite(scale)) {
        throw ValidationError("pose/animation parameters must be finite");
    }
    if (!(tz > 0.0)) {
        throw ValidationError("tz must be positive (face in front of the camera)");
    }
    if (!(scale > 0.0)) {
        throw ValidationError("scale must be positive");
    }
}

double normalize_angle(double radians)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::remainder(radians, two_pi); // [-pi, pi]
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
}

double deg2rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

double rad2deg(double radians) { return radians * 180.0 / std::numbers::pi; }

Eigen::Matrix3d rotation_matrix(double rx, double ry, double rz)
{
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(rz, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(ry, Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(rx, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    return r;
}

Eigen::Vector3d euler_angles(const Eigen::Matrix3d& r)
{
    const double sy = std::clamp(-r(2, 0), -1.0, 1.0);
    const double ry = std::asin(sy);
    double rx = 0.0;
    double rz = 0.0;
    if (std::abs(sy) < 1.0 - 1e-12) {
        rx = std::atan2(r(2, 1), r(2, 2));
        rz = std::atan2(r(1, 0), r(0, 0));
    } else {
        // Gimbal lock: only rx - rz (or rx + rz) is determined; put it all in rx.
        rx = std::atan2(-r(1, 2), r(1, 1));
    }
    return {rx, ry, rz};
}

namespace {

void check_sigma(const WireframeModel& model, const Eigen::VectorXd& sigma)
{
    if (sigma.size() != model.num_shape_units()) {
        throw ValidationError("sigma has " + std::to_string(sigma.size()) + " coefficients, model has " +
                              std::to_string(model.num_shape_units()) + " shape units");
    }
}

Eigen::VectorXd scatter_anim(const WireframeModel& model, const std::array<double, kNumAnimParams>& anim)
{
    if (model.anim_selection.size() != static_cast<std::size_t>(kNumAnimParams)) {
        throw ValidationError("model has no animation selection");
    }
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(model.num_anim_units());
    for (std::size_t k = 0; k < anim.size(); ++k) {
        alpha(model.anim_selection[k]) = anim[k];
    }
    return alpha;
}

} // namespace

Eigen::Vector3d deformed_vertex(const WireframeModel& model, const Eigen::VectorXd& sigma,
                                const std::array<double, kNumAnimParams>& anim, int vertex)
{
    check_sigma(model, sigma);
    if (model.anim_selection.size() != static_cast<std::size_t>(kNumAnimParams)) {
        throw ValidationError("model has no animation selection");
    }
    Eigen::Vector3d p = model.mean_shape.row(vertex).transpose();
    if (sigma.size() > 0) p += model.shape_units.middleRows(3 * vertex, 3) * sigma;
    for (std::size_t k = 0; k < anim.size(); ++k) {
        if (anim[k] != 0.0) p += anim[k] * model.anim_units.block(3 * vertex, model.anim_selection[k], 3, 1);
    }
    return p;
}

Points3 shape_instance(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b)
{
    check_sigma(model, sigma);
    const Eigen::VectorXd alpha = scatter_anim(model, b.anim);

    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(model.mean_shape.data(), model.mean_shape.size());
    if (sigma.size() > 0) g += model.shape_units * sigma;
    if (alpha.size() > 0) g += model.anim_units * alpha;

    const Eigen::Matrix3d sr = b.scale * rotation_matrix(b.rx, b.ry, b.rz);
    const Eigen::RowVector3d t(b.tx, b.ty, b.tz);
    Points3 out(model.num_vertices(), 3);
    const Eigen::Map<const Points3> deformed(g.data(), model.num_vertices(), 3);
    out = deformed * sr.transpose();
    out.rowwise() += t;
    return out;
}

Projection project(const Points3& points, const CameraIntrinsics& cam)
{
    const auto n = points.rows();
    Projection p;
    p.pixels.resize(n, 2);
    p.depth.resize(n);
    p.valid.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = points(i, 2);
        p.depth(i) = z;
        if (z > kMinDepth && std::isfinite(z)) {
            p.pixels(i, 0) = cam.cx + cam.focal_px * points(i, 0) / z;
            p.pixels(i, 1) = cam.cy + cam.focal_px * points(i, 1) / z;
            p.valid[static_cast<std::size_t>(i)] = true;
        } else {
            p.pixels.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return p;
}

Projection landmark_positions(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                              const CameraIntrinsics& cam)
{
    check_sigma(model, sigma);
    const Eigen::Matrix3d sr = b.scale * rotation_matrix(b.rx, b.ry, b.rz);
    const Eigen::Vector3d t(b.tx, b.ty, b.tz);
    Points3 pts(static_cast<Eigen::Index>(model.landmark_indices.size()), 3);
    for (std::size_t k = 0; k < model.landmark_indices.size(); ++k) {
        const Eigen::Vector3d p = sr * deformed_vertex(model, sigma, b.anim, model.landmark_indices[k]) + t;
        pts.row(static_cast<Eigen::Index>(k)) = p.transpose();
    }
    return project(pts, cam);
}

} // namespace facetrack
