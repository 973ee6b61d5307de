/*
 * facetrack - Pose from orthography and scaling with iterations
 *
 * File: core/include/facetrack/posit.hpp
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

#include "facetrack/error.hpp"
#include "facetrack/geometry.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace facetrack {

struct RigidPose
{
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// POSIT did not reach its tolerance; carries the last iterate.
class PositNotConverged : public Error
{
public:
    PositNotConverged(RigidPose last, int iterations)
        : Error("POSIT did not converge after " + std::to_string(iterations) + " iterations"),
          last_(std::move(last)), iterations_(iterations)
    {
    }

    const RigidPose& last_iterate() const noexcept { return last_; }
    int iterations() const noexcept { return iterations_; }

private:
    RigidPose last_;
    int iterations_;
};

struct PositOptions
{
    double tolerance = 1e-6;
    int max_iterations = 100;
};

/**
 * Pose from Orthography and Scaling with ITerations (DeMenthon & Davis).
 *
 * Estimates R, t with image ~ project(R * object + t). Needs at least four
 * non-coplanar object points. Iterates the scaled-orthographic solution
 * with perspective correction until the pose changes by less than
 * options.tolerance.
 *
 * Throws ValidationError on bad sizes, RankError for coplanar or otherwise
 * degenerate object points, PositNotConverged when the iteration cap is hit.
 */
RigidPose posit(const Points3& object_points, const Points2& image_points, const CameraIntrinsics& cam,
                const PositOptions& options = {});

struct Annotation
{
    int ordinal = 0; ///< landmark ordinal, 0..25
    double u = 0.0;
    double v = 0.0;
};

struct AnnotationSet
{
    std::vector<Annotation> entries;
    std::string frame_id;

    /// At least 6 entries, distinct ordinals in [0, 26), finite coordinates.
    void validate() const;
};

/// One "ordinal u v" line per landmark; '#' starts a comment.
AnnotationSet read_annotations(std::istream& in, std::string frame_id = {});
AnnotationSet read_annotations_file(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const AnnotationSet& annotations);

struct InitOptions
{
    bool refine_shape = false;
    int refine_rounds = 3;
    /// Tikhonov weight on sigma in the shape refinement least squares.
    double shape_regularization = 1e-2;
    double rmse_warning_px = 5.0;
    PositOptions posit;
};

struct InitResult
{
    PoseAnimParams b0;
    Eigen::VectorXd sigma0;
    double reproj_rmse = 0.0;
    bool rmse_warning = false;
};

/**
 * Initial pose from first-frame annotations: POSIT on the annotated landmark
 * vertices, optionally alternating with a linear least-squares fit of the
 * shape coefficients. Animation is zero and scale one.
 */
InitResult initialize(const WireframeModel& model, const AnnotationSet& annotations, const CameraIntrinsics& cam,
                      const InitOptions& options = {});

/// JSON with the pose in degrees plus sigma and the reprojection error.
void write_init_result(std::ostream& out, const InitResult& init);
InitResult read_init_result(std::istream& in);

} // namespace facetrack
