/*
 * facetrack - Synthetic head sequences with ground truth
 *
 * File: core/include/facetrack/synthetic.hpp
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
#include "facetrack/wireframe.hpp"

#include <cstdint>
#include <vector>

namespace facetrack {

/**
 * Procedural face appearance for closed-loop experiments.
 *
 * Intensity is a function of a surface point's neutral model-frame (x, y),
 * so the pattern moves with the mesh under pose and animation. It has dark
 * eyes, brows, nostrils and mouth over a noisy skin tone. The background is
 * a fixed pattern in image coordinates.
 */
class SyntheticFace
{
public:
    explicit SyntheticFace(std::uint64_t seed = 7);

    /// Skin intensity (0..255) at neutral model-frame coordinates.
    double surface(double x, double y) const;
    /// Background intensity at an image location.
    double background(double u, double v) const;

    /**
     * Ground-truth frame: perspective-correct z-buffered rendering of the
     * front-facing mesh with supersamples x supersamples samples per pixel.
     */
    GrayImage render(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                     const CameraIntrinsics& cam, int supersamples = 2) const;

private:
    struct Wave
    {
        double kx, ky, phase, amplitude;
    };
    std::vector<Wave> skin_;
    std::vector<Wave> backdrop_;
};

struct SyntheticMotion
{
    int frames = 60;
    int width = 320;
    int height = 240;
    double tz = 6.0;
    double pan_amplitude = 20.0; ///< degrees
    double pan_period = 60.0;    ///< frames
    double tilt_amplitude = 15.0;
    double tilt_period = 45.0;
    double roll_amplitude = 10.0;
    double roll_period = 30.0;
    int anim_index = 1; ///< tracked animation parameter that oscillates (1: jaw drop)
    double anim_amplitude = 0.5;
    double anim_period = 20.0;
    double drift_px = 10.0; ///< largest image-plane displacement from translation
    std::uint64_t seed = 7;
};

struct SyntheticSequence
{
    std::vector<GrayImage> frames;
    std::vector<PoseAnimParams> truth;
    CameraIntrinsics cam;
    Eigen::VectorXd sigma;
    AnnotationSet annotations; ///< exact visible landmark positions in frame 0
};

/// State of frame t under the motion: sinusoidal rotations and animation, translation drift.
PoseAnimParams synthetic_state(const SyntheticMotion& motion, const CameraIntrinsics& cam, int t);

SyntheticSequence make_sequence(const WireframeModel& model, const SyntheticMotion& motion);

} // namespace facetrack
