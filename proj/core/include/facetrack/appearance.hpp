/*
 * facetrack - Incremental Gaussian appearance model
 *
 * File: core/include/facetrack/appearance.hpp
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

#include "facetrack/descriptor.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace facetrack {

/**
 * Gaussian over one landmark's descriptors, kept in eigen-decomposed form
 * Sigma = U * diag(S) * U^T. Online updates only rescale S, so U is fixed
 * after training and Sigma stays symmetric positive definite.
 */
struct LandmarkGaussian
{
    Descriptor mu = Descriptor::Zero();
    Eigen::MatrixXd eigvecs; ///< 128 x 128, orthonormal columns
    Eigen::VectorXd eigvals; ///< 128, all > 0

    Eigen::MatrixXd covariance() const;
};

struct AppearanceModel
{
    std::vector<LandmarkGaussian> gaussians; ///< one per landmark ordinal
    double alpha = 0.1;                      ///< forgetting factor, in (0, 1)
    double ridge = 1e-4;
};

/// Throws ValidationError unless 0 < alpha < 1.
void check_forgetting_factor(double alpha);

/**
 * Sample mean and covariance (n - 1 denominator) plus ridge * I for every
 * landmark, eigen-decomposed once. samples[i] holds landmark i's
 * descriptors. Throws ValidationError if a landmark has fewer than two
 * samples or a covariance is not positive definite (ridge 0 on rank-deficient data).
 */
AppearanceModel train(const std::vector<std::vector<Descriptor>>& samples, double alpha, double ridge);

/// (y - mu)^T Sigma^-1 (y - mu) through the cached eigen-decomposition.
double mahalanobis(const LandmarkGaussian& g, const Descriptor& y);

/// mu' = (1 - alpha) mu + alpha y.
Descriptor update_mean(const LandmarkGaussian& g, const Descriptor& y, double alpha);

/// S' = (1 - alpha) S + alpha |y - mu|^2 I, with mu the current (pre-update) mean.
Eigen::VectorXd update_covariance(const LandmarkGaussian& g, const Descriptor& y, double alpha);

/// Covariance update then mean update, in place, for one landmark.
void update_gaussian(LandmarkGaussian& g, const Descriptor& y, double alpha);

/// update_gaussian on every visible landmark; invisible ones are untouched.
void update(AppearanceModel& model, const FrameObservation& obs);

/// Little-endian binary: magic, version, alpha, ridge, count, then per
/// landmark mu, eigvals and eigvecs (column-major) as float64. Lossless.
void save_appearance(std::ostream& out, const AppearanceModel& model);
AppearanceModel load_appearance(std::istream& in);
void save_appearance_file(const std::filesystem::path& path, const AppearanceModel& model);
AppearanceModel load_appearance_file(const std::filesystem::path& path);

} // namespace facetrack
