/*
 * facetrack - Deformable face wireframe model
 *
 * File: core/include/facetrack/wireframe.hpp
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

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facetrack {

/// N x 3 points, one vertex per row. Row-major so the storage is the
/// vertex-interleaved (x1, y1, z1, x2, ...) layout used by the unit matrices.
using Points3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline constexpr int kNumLandmarks = 26;
inline constexpr int kNumAnimParams = 6;

/**
 * Landmark vertices of the bundled wireframe, in tracker ordinal order:
 *
 *   0-3    brows (left outer, left inner, right inner, right outer)
 *   4-7    left eye (outer corner, inner corner, upper lid, lower lid)
 *   8-11   right eye (inner corner, outer corner, upper lid, lower lid)
 *   12-15  nose (bridge, tip, left ala, right ala)
 *   16-23  mouth (left corner, right corner, upper outer, lower outer,
 *          upper inner, lower inner, upper left, upper right)
 *   24-25  contour (left cheek, right cheek)
 *
 * "Left" is image left for a frontal face. Other wireframes (e.g. the
 * official candide3.wfm) need their own indices but must keep this ordinal
 * meaning; the eye ordinals drive the descriptor patch scale.
 */
inline constexpr std::array<int, kNumLandmarks> kDefaultLandmarkIndices{
    56, 57, 58, 59, 60, 61, 62, 63, 64, 65, 66, 67, 68,
    69, 70, 71, 72, 73, 74, 75, 76, 77, 78, 79, 30, 54};

/// Upper lip raiser, jaw drop, lip stretcher, brow lowerer, outer brow raiser, eyes closed.
inline constexpr std::array<int, kNumAnimParams> kDefaultAnimSelection{0, 1, 2, 3, 5, 6};

inline constexpr std::array<int, 2> kLeftEyeCornerOrdinals{4, 5};
inline constexpr std::array<int, 2> kRightEyeCornerOrdinals{8, 9};

extern const std::array<std::string_view, kNumLandmarks> kLandmarkNames;

/**
 * A Candide-style parameterised face mesh: g = mean + S*sigma + A*alpha.
 *
 * All coordinates are in the model frame used by the renderer and the
 * tracker: x to the image right, y down, z away from the camera. Files in the
 * Candide convention (y up, z towards the viewer) are converted on load.
 */
struct WireframeModel
{
    Points3 mean_shape;
    Triangles triangles;
    Eigen::MatrixXd shape_units; ///< 3N x num_shape_units
    Eigen::MatrixXd anim_units;  ///< 3N x num_anim_units
    std::vector<std::string> shape_unit_names;
    std::vector<std::string> anim_unit_names;
    std::vector<int> landmark_indices;
    std::vector<int> anim_selection;

    int num_vertices() const noexcept { return static_cast<int>(mean_shape.rows()); }
    int num_triangles() const noexcept { return static_cast<int>(triangles.rows()); }
    int num_shape_units() const noexcept { return static_cast<int>(shape_units.cols()); }
    int num_anim_units() const noexcept { return static_cast<int>(anim_units.cols()); }
};

/**
 * Parses a wireframe in the Candide .wfm layout: vertex list, face list,
 * animation units and shape units, each introduced by a header line such as
 * "# VERTEX LIST:". Other '#' lines are comments; the last comment before a
 * unit is taken as its name. Anything after the shape units is ignored.
 *
 * Throws ParseError (with line number) on malformed input and
 * ValidationError when a landmark or animation index is out of range.
 */
WireframeModel load_model(std::istream& source, std::span<const int> landmark_indices,
                          std::span<const int> anim_selection);

WireframeModel load_model_file(const std::filesystem::path& path, std::span<const int> landmark_indices,
                               std::span<const int> anim_selection);

/// Raw text of the wireframe compiled into the library.
std::string_view bundled_wireframe_text();

/// The bundled wireframe with the default landmark and animation selections.
WireframeModel bundled_model();

} // namespace facetrack
