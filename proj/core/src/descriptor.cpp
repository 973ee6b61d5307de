/*
 * facetrack - Upright gradient-histogram landmark descriptors
 *
 * File: core/src/descriptor.cpp
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

#include "facetrack/descriptor.hpp"

#include "facetrack/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace facetrack {

namespace {

constexpr int kCells = 4;
constexpr int kOrientations = 8;

} // namespace

void normalize_descriptor(Descriptor& d)
{
    const double norm = d.norm();
    if (!(norm > 0.0)) {
        d.setZero();
        return;
    }
    d /= norm;
    if (d.maxCoeff() <= kDescriptorClamp) return;

    // Fixed point of "clamp at c, renormalise": w = min(d, tau) with
    // tau = c * |w|. With m clamped entries and R the squared norm of the
    // rest, tau^2 = c^2 R / (1 - c^2 m).
    std::array<double, kDescriptorSize> sorted{};
    std::copy(d.data(), d.data() + kDescriptorSize, sorted.begin());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double c2 = kDescriptorClamp * kDescriptorClamp;

    double rest = 0.0;
    for (const double v : sorted) rest += v * v;
    for (int m = 1; m < kDescriptorSize && c2 * m < 1.0; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        if (!(sorted[mi] > 0.0)) break; // every non-zero bin clamped: equal-valued case below
        rest -= sorted[mi - 1] * sorted[mi - 1];
        const double tau = std::sqrt(c2 * std::max(rest, 0.0) / (1.0 - c2 * m));
        if (sorted[mi - 1] >= tau && tau >= sorted[mi]) {
            d = d.cwiseMin(tau);
            d /= d.norm();
            return;
        }
    }
    // Fewer than 1/c^2 non-zero bins: the fixed point has them all equal.
    const auto nonzero = (d.array() > 0.0).count();
    d = (d.array() > 0.0).cast<double>() / std::sqrt(static_cast<double>(nonzero));
}

Descriptor sift_at(const GrayImage& image, const Eigen::Vector2d& center, double patch_scale)
{
    if (!(patch_scale > 0.0) || !std::isfinite(patch_scale)) {
        throw ValidationError("patch scale must be positive");
    }
    const int w = image.cols;
    const int h = image.rows;
    if (!center.allFinite() || center.x() < 0.0 || center.y() < 0.0 || center.x() > w - 1.0 ||
        center.y() > h - 1.0) {
        throw OutOfBoundsError("descriptor centre outside the image");
    }

    const double cell = patch_scale / kCells;
    const double sigma = patch_scale / 2.0;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    // Samples further than 2.5 cells from the centre fall outside every bin.
    const double reach = 0.5 * (kCells + 1) * cell;
    const int x_lo = std::max(0, static_cast<int>(std::ceil(center.x() - reach)));
    const int x_hi = std::min(w - 1, static_cast<int>(std::floor(center.x() + reach)));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(center.y() - reach)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::floor(center.y() + reach)));
    const double bins_per_radian = kOrientations / (2.0 * std::numbers::pi);

    Descriptor hist = Descriptor::Zero();
    for (int y = y_lo; y <= y_hi; ++y) {
        const auto* row = image.ptr(y);
        const auto* up = image.ptr(std::max(y - 1, 0));
        const auto* down = image.ptr(std::min(y + 1, h - 1));
        const double dy = y - center.y();
        const double rbin = dy / cell + 0.5 * (kCells - 1);
        if (rbin <= -1.0 || rbin >= kCells) continue;
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - center.x();
            const double cbin = dx / cell + 0.5 * (kCells - 1);
            if (cbin <= -1.0 || cbin >= kCells) continue;

            const double gx = static_cast<double>(row[std::min(x + 1, w - 1)]) - row[std::max(x - 1, 0)];
            const double gy = static_cast<double>(down[x]) - up[x];
            if (gx == 0.0 && gy == 0.0) continue;
            const double mag = std::hypot(gx, gy) * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += 2.0 * std::numbers::pi;
            const double obin = theta * bins_per_radian;

            const int r0 = static_cast<int>(std::floor(rbin));
            const int c0 = static_cast<int>(std::floor(cbin));
            const int o0 = static_cast<int>(std::floor(obin));
            const double fr = rbin - r0;
            const double fc = cbin - c0;
            const double fo = obin - o0;
            for (int i = 0; i < 2; ++i) {
                const int r = r0 + i;
                if (r < 0 || r >= kCells) continue;
                const double wr = i == 0 ? 1.0 - fr : fr;
                for (int j = 0; j < 2; ++j) {
                    const int c = c0 + j;
                    if (c < 0 || c >= kCells) continue;
                    const double wc = j == 0 ? 1.0 - fc : fc;
                    for (int k = 0; k < 2; ++k) {
                        const int o = (o0 + k) % kOrientations;
                        const double wo = k == 0 ? 1.0 - fo : fo;
                        hist((r * kCells + c) * kOrientations + o) += mag * wr * wc * wo;
                    }
                }
            }
        }
    }
    normalize_descriptor(hist);
    return hist;
}

int FrameObservation::num_visible() const
{
    return static_cast<int>(std::count(visibility.begin(), visibility.end(), true));
}

FrameObservation observe(const GrayImage& image, const Points2& landmarks, const std::vector<bool>& visibility,
                         double patch_scale)
{
    const auto n = static_cast<std::size_t>(landmarks.rows());
    if (visibility.size() != n) throw ValidationError("observe: visibility size mismatch");

    FrameObservation obs;
    obs.descriptors.assign(n, Descriptor::Zero());
    obs.visibility.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (!visibility[k]) continue;
        const Eigen::Vector2d c = landmarks.row(static_cast<Eigen::Index>(k)).transpose();
        try {
            obs.descriptors[k] = sift_at(image, c, patch_scale);
            obs.visibility[k] = true;
        } catch (const OutOfBoundsError&) {
            obs.descriptors[k].setZero();
        }
    }
    return obs;
}

double interocular_distance(const Points2& landmarks)
{
    if (landmarks.rows() < kNumLandmarks) throw ValidationError("interocular_distance: too few landmarks");
    const Eigen::RowVector2d left =
        0.5 * (landmarks.row(kLeftEyeCornerOrdinals[0]) + landmarks.row(kLeftEyeCornerOrdinals[1]));
    const Eigen::RowVector2d right =
        0.5 * (landmarks.row(kRightEyeCornerOrdinals[0]) + landmarks.row(kRightEyeCornerOrdinals[1]));
    return (left - right).norm();
}

double patch_scale_for(const Points2& landmarks, double factor)
{
    const double s = factor * interocular_distance(landmarks);
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("degenerate descriptor patch scale");
    return s;
}

} // namespace facetrack
