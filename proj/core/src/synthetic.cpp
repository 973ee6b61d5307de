/*
 * facetrack - Synthetic head sequences with ground truth
 *
 * File: core/src/synthetic.cpp
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

#include "facetrack/synthetic.hpp"

#include "facetrack/error.hpp"
#include "facetrack/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace facetrack {

namespace {

double blob(double x, double y, double cx, double cy, double rx, double ry)
{
    const double dx = (x - cx) / rx;
    const double dy = (y - cy) / ry;
    return std::exp(-0.5 * (dx * dx + dy * dy));
}

} // namespace

SyntheticFace::SyntheticFace(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> freq(0.5, 1.0);
    // Skin: a few octaves over the unit-sized face.
    for (int octave = 0; octave < 4; ++octave) {
        for (int k = 0; k < 3; ++k) {
            const double f = 3.0 * std::pow(2.0, octave) * freq(rng);
            const double dir = angle(rng);
            skin_.push_back({f * std::cos(dir), f * std::sin(dir), angle(rng), 10.0 / (octave + 1)});
        }
    }
    // Background: pixel-scale wavelengths between 12 and 60 pixels.
    std::uniform_real_distribution<double> wavelength(12.0, 60.0);
    for (int k = 0; k < 6; ++k) {
        const double f = 2.0 * std::numbers::pi / wavelength(rng);
        const double dir = angle(rng);
        backdrop_.push_back({f * std::cos(dir), f * std::sin(dir), angle(rng), 12.0});
    }
}

double SyntheticFace::surface(double x, double y) const
{
    double v = 165.0 - 25.0 * (x * x + 0.5 * y * y);
    for (const auto& w : skin_) v += w.amplitude * std::sin(w.kx * x + w.ky * y + w.phase);

    for (const double side : {-1.0, 1.0}) {
        // brows
        v -= 80.0 * blob(x, y, side * 0.39, -0.49, 0.20, 0.035);
        // eye socket shading, white, then iris
        v -= 30.0 * blob(x, y, side * 0.38, -0.25, 0.22, 0.10);
        v += 50.0 * blob(x, y, side * 0.38, -0.245, 0.14, 0.045);
        v -= 130.0 * blob(x, y, side * 0.38, -0.245, 0.05, 0.045);
        // nostrils and nose side shading
        v -= 70.0 * blob(x, y, side * 0.09, 0.25, 0.04, 0.025);
        v -= 20.0 * blob(x, y, side * 0.13, 0.0, 0.05, 0.20);
    }
    // lips and the dark mouth line
    v -= 45.0 * blob(x, y, 0.0, 0.60, 0.30, 0.09);
    v -= 70.0 * blob(x, y, 0.0, 0.62, 0.28, 0.025);
    // chin shadow
    v -= 20.0 * blob(x, y, 0.0, 1.0, 0.4, 0.12);
    return std::clamp(v, 0.0, 255.0);
}

double SyntheticFace::background(double u, double v) const
{
    double s = 70.0;
    for (const auto& w : backdrop_) s += w.amplitude * std::sin(w.kx * u + w.ky * v + w.phase);
    return std::clamp(s, 0.0, 255.0);
}

GrayImage SyntheticFace::render(const WireframeModel& model, const Eigen::VectorXd& sigma, const PoseAnimParams& b,
                                const CameraIntrinsics& cam, int supersamples) const
{
    cam.validate();
    if (supersamples < 1) throw ValidationError("supersamples must be positive");
    const int s = supersamples;
    const int sw = cam.width * s;
    const int sh = cam.height * s;

    const Points3 vertices = shape_instance(model, sigma, b);
    const Projection proj = project(vertices, cam);
    const std::vector<bool> front = front_facing_triangles(model, vertices);

    std::vector<double> depth(static_cast<std::size_t>(sw) * sh, std::numeric_limits<double>::infinity());
    std::vector<Eigen::Vector2d> canon(static_cast<std::size_t>(sw) * sh);

    // Supersample (i, j) of pixel (x, y) sits at x + (i + 0.5) / s - 0.5.
    auto sample_pos = [s](int k) { return (k + 0.5) / s - 0.5; };

    for (int f = 0; f < model.num_triangles(); ++f) {
        if (!front[static_cast<std::size_t>(f)]) continue;
        std::array<Eigen::Vector2d, 3> p;
        std::array<double, 3> inv_z{};
        std::array<Eigen::Vector2d, 3> c;
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
            const int v = model.triangles(f, k);
            if (!proj.valid[static_cast<std::size_t>(v)]) ok = false;
            p[static_cast<std::size_t>(k)] = proj.pixels.row(v).transpose();
            inv_z[static_cast<std::size_t>(k)] = 1.0 / proj.depth(v);
            c[static_cast<std::size_t>(k)] = model.mean_shape.row(v).head<2>().transpose();
        }
        if (!ok) continue;
        const double area = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
        if (std::abs(area) < 1e-12) continue;

        const double min_x = std::min({p[0].x(), p[1].x(), p[2].x()});
        const double max_x = std::max({p[0].x(), p[1].x(), p[2].x()});
        const double min_y = std::min({p[0].y(), p[1].y(), p[2].y()});
        const double max_y = std::max({p[0].y(), p[1].y(), p[2].y()});
        const int sx0 = std::max(0, static_cast<int>(std::ceil((min_x + 0.5) * s - 0.5)));
        const int sx1 = std::min(sw - 1, static_cast<int>(std::floor((max_x + 0.5) * s - 0.5)));
        const int sy0 = std::max(0, static_cast<int>(std::ceil((min_y + 0.5) * s - 0.5)));
        const int sy1 = std::min(sh - 1, static_cast<int>(std::floor((max_y + 0.5) * s - 0.5)));

        for (int sy = sy0; sy <= sy1; ++sy) {
            const double y = sy / s + sample_pos(sy % s);
            for (int sx = sx0; sx <= sx1; ++sx) {
                const double x = sx / s + sample_pos(sx % s);
                std::array<double, 3> l{};
                for (int k = 0; k < 3; ++k) {
                    const auto& a = p[static_cast<std::size_t>((k + 1) % 3)];
                    const auto& bb = p[static_cast<std::size_t>((k + 2) % 3)];
                    l[static_cast<std::size_t>(k)] =
                        ((bb.x() - a.x()) * (y - a.y()) - (bb.y() - a.y()) * (x - a.x())) / area;
                }
                if (l[0] < 0.0 || l[1] < 0.0 || l[2] < 0.0) continue;
                const double w = l[0] * inv_z[0] + l[1] * inv_z[1] + l[2] * inv_z[2];
                const double z = 1.0 / w;
                const auto idx = static_cast<std::size_t>(sy) * sw + sx;
                if (!(z < depth[idx])) continue;
                depth[idx] = z;
                canon[idx] = (l[0] * inv_z[0] * c[0] + l[1] * inv_z[1] * c[1] + l[2] * inv_z[2] * c[2]) / w;
            }
        }
    }

    GrayImage out(cam.height, cam.width);
    const double norm = 1.0 / (s * s);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) {
                for (int i = 0; i < s; ++i) {
                    const auto idx = static_cast<std::size_t>(y * s + j) * sw + (x * s + i);
                    acc += std::isfinite(depth[idx]) ? surface(canon[idx].x(), canon[idx].y())
                                                     : background(x + sample_pos(i), y + sample_pos(j));
                }
            }
            out(y, x) = static_cast<std::uint8_t>(std::lround(std::clamp(acc * norm, 0.0, 255.0)));
        }
    }
    return out;
}

PoseAnimParams synthetic_state(const SyntheticMotion& m, const CameraIntrinsics& cam, int t)
{
    const double two_pi = 2.0 * std::numbers::pi;
    const double tt = static_cast<double>(t);
    PoseAnimParams b;
    b.ry = deg2rad(m.pan_amplitude * std::sin(two_pi * tt / m.pan_period));
    b.rx = deg2rad(m.tilt_amplitude * std::sin(two_pi * tt / m.tilt_period));
    b.rz = deg2rad(m.roll_amplitude * std::sin(two_pi * tt / m.roll_period));
    const double px = m.tz / cam.focal_px; // model units per pixel at depth tz
    const double progress = m.frames > 1 ? tt / (m.frames - 1) : 0.0;
    b.tx = m.drift_px * px * progress;
    b.ty = m.drift_px * px * std::sin(std::numbers::pi * progress) * 0.6;
    b.tz = m.tz;
    if (m.anim_index >= 0) {
        b.anim[static_cast<std::size_t>(m.anim_index)] = m.anim_amplitude * std::sin(two_pi * tt / m.anim_period);
    }
    return b;
}

SyntheticSequence make_sequence(const WireframeModel& model, const SyntheticMotion& motion)
{
    if (motion.frames < 1) throw ValidationError("synthetic sequence needs at least one frame");
    if (motion.anim_index >= kNumAnimParams) throw ValidationError("synthetic anim_index out of range");
    if (!(motion.tz > 0.0)) throw ValidationError("synthetic tz must be positive");

    SyntheticSequence seq;
    seq.cam = CameraIntrinsics::for_image(motion.width, motion.height);
    seq.sigma = Eigen::VectorXd::Zero(model.num_shape_units());
    const SyntheticFace face(motion.seed);
    for (int t = 0; t < motion.frames; ++t) {
        const PoseAnimParams b = synthetic_state(motion, seq.cam, t);
        seq.truth.push_back(b);
        seq.frames.push_back(face.render(model, seq.sigma, b, seq.cam));
    }

    const PoseAnimParams& b0 = seq.truth.front();
    const Points3 vertices = shape_instance(model, seq.sigma, b0);
    const Projection proj = project(vertices, seq.cam);
    const auto visible = landmark_visibility(model, vertices, proj, seq.cam, kVisibilityDepthEps * b0.tz);
    seq.annotations.frame_id = "0";
    for (std::size_t k = 0; k < model.landmark_indices.size(); ++k) {
        if (!visible[k]) continue;
        const int v = model.landmark_indices[k];
        seq.annotations.entries.push_back({static_cast<int>(k), proj.pixels(v, 0), proj.pixels(v, 1)});
    }
    seq.annotations.validate();
    return seq;
}

} // namespace facetrack
