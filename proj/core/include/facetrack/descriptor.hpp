/*
 * facetrack - Upright gradient-histogram landmark descriptors
 *
 * File: core/include/facetrack/descriptor.hpp
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

#include "facetrack/image.hpp"
#include "facetrack/wireframe.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace facetrack {

inline constexpr int kDescriptorSize = 128;
inline constexpr double kDescriptorClamp = 0.2;

using Descriptor = Eigen::Matrix<double, kDescriptorSize, 1>;

/**
 * Upright SIFT descriptor centred on a pixel location.
 *
 * The patch is 4 x 4 cells of patch_scale / 4 pixels. Central-difference
 * gradients are Gaussian weighted (sigma = patch_scale / 2) and spread over
 * 4 x 4 x 8 bins by trilinear interpolation. The histogram is L2
 * normalised and then clamped at 0.2 and renormalised until no entry
 * exceeds 0.2 (a single pass of Lowe's clamp can leave entries above it).
 * Pixels outside the image contribute nothing. Flat patches give the zero
 * vector.
 *
 * Throws OutOfBoundsError when the centre is outside the image.
 */
Descriptor sift_at(const GrayImage& image, const Eigen::Vector2d& center, double patch_scale);

/// In-place L2 normalisation followed by the 0.2 clamp; zero stays zero.
void normalize_descriptor(Descriptor& d);

struct FrameObservation
{
    std::vector<Descriptor> descriptors; ///< zero for invisible landmarks
    std::vector<bool> visibility;
    std::string frame_id;

    int num_visible() const;
};

/// sift_at for every visible landmark; landmarks that are invisible,
/// non-finite or outside the image come back as zero and invisible.
FrameObservation observe(const GrayImage& image, const Points2& landmarks, const std::vector<bool>& visibility,
                         double patch_scale);

/// Distance between the two eye centres (mean of each eye's corners).
double interocular_distance(const Points2& landmarks);

/// factor * interocular distance. Throws ValidationError if not positive and finite.
double patch_scale_for(const Points2& landmarks, double factor);

} // namespace facetrack
