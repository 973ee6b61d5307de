/*
 * facetrack - Software rasteriser for textured wireframes
 *
 * File: core/include/facetrack/render.hpp
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

#include "facetrack/geometry.hpp"
#include "facetrack/image.hpp"
#include "facetrack/posit.hpp"

#include <opencv2/core.hpp>

#include <array>
#include <filesystem>
#include <vector>

namespace facetrack {

/// Head rotation in degrees. pan -> ry, tilt -> rx, roll -> rz.
struct PoseAngles
{
    double pan = 0.0;
    double tilt = 0.0;
    double roll = 0.0;
};

/// Every (pan, tilt, roll) with each angle in lo, lo + step, ..., hi.
/// Pan varies slowest, roll fastest.
std::vector<PoseAngles> pose_grid(double lo, double hi, double step);

/// The mesh with each triangle mapped (affinely in barycentric coordinates)
/// onto the source frame. Immutable once built.
struct TexturedModel
{
    WireframeModel model;
    Eigen::VectorXd sigma;
    GrayImage source;
    std::vector<std::array<Eigen::Vector2d, 3>> texture_coords; ///< source pixels per triangle vertex
    std::vector<bool> textured;

    double textured_fraction() const;
};

/// Maps every triangle that is front-facing, in front of the camera and
/// non-degenerate at init.b0 onto the frame; the rest stay untextured.
TexturedModel extract_texture(const GrayImage& frame, const WireframeModel& model, const InitResult& init,
                              const CameraIntrinsics& cam);

struct RenderOutput
{
    GrayImage image;               ///< background and untextured surface are 0
    cv::Mat_<float> depth;         ///< +inf where nothing was drawn
    Points3 vertices;              ///< camera-frame vertices
    Projection projection;         ///< of all vertices
    std::vector<bool> front_facing; ///< per triangle
};

/// Z-buffered rasterisation of the front-facing triangles at state b with
/// bilinear texture lookup.
RenderOutput render(const TexturedModel& tm, const PoseAnimParams& b, const CameraIntrinsics& cam);

/// Per-triangle front-facing flags for camera-frame vertices.
std::vector<bool> front_facing_triangles(const WireframeModel& model, const Points3& vertices);

/**
 * Landmark visibility for a posed mesh. A landmark is visible when it
 * projects inside the image, at least one triangle around it faces the
 * camera, and its depth is within depth_eps of the nearest front-facing
 * surface at its exact image position.
 */
std::vector<bool> landmark_visibility(const WireframeModel& model, const Points3& vertices,
                                      const Projection& projection, const CameraIntrinsics& cam, double depth_eps);

/// Relative depth tolerance for landmark visibility (times tz).
inline constexpr double kVisibilityDepthEps = 1e-3;

struct RenderedView
{
    GrayImage image;
    PoseAngles pose;
    Points2 landmarks;
    std::vector<bool> visibility;
};

/// Renders with b0's rotation replaced by the given angles; translation,
/// animation and the texture's sigma are kept.
RenderedView render_view(const TexturedModel& tm, const PoseAngles& pose, const PoseAnimParams& b0,
                         const CameraIntrinsics& cam);

/// render_view over the grid, in grid order. Views are rendered in parallel.
std::vector<RenderedView> generate_database(const TexturedModel& tm, const std::vector<PoseAngles>& grid,
                                            const PoseAnimParams& b0, const CameraIntrinsics& cam);

/// Writes view_NNNN.<ext> images and views.csv (pose, landmarks, visibility).
void write_database(const std::filesystem::path& directory, const std::vector<RenderedView>& views,
                    const std::string& extension = ".png");

} // namespace facetrack
