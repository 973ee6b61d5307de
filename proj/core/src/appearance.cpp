/*
 * facetrack - Incremental Gaussian appearance model
 *
 * File: core/src/appearance.cpp
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

#include "facetrack/appearance.hpp"

#include "facetrack/error.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <fstream>
#include <istream>
#include <ostream>

namespace facetrack {

Eigen::MatrixXd LandmarkGaussian::covariance() const
{
    return eigvecs * eigvals.asDiagonal() * eigvecs.transpose();
}

void check_forgetting_factor(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("forgetting factor must lie in (0, 1), got " + std::to_string(alpha));
    }
}

AppearanceModel train(const std::vector<std::vector<Descriptor>>& samples, double alpha, double ridge)
{
    check_forgetting_factor(alpha);
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ValidationError("ridge must be non-negative");

    AppearanceModel model;
    model.alpha = alpha;
    model.ridge = ridge;
    model.gaussians.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.size() < 2) {
            throw ValidationError("landmark " + std::to_string(i) + " has " + std::to_string(s.size()) +
                                  " training samples, need at least 2");
        }
        Eigen::MatrixXd x(kDescriptorSize, static_cast<Eigen::Index>(s.size()));
        for (std::size_t k = 0; k < s.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = s[k];

        auto& g = model.gaussians[i];
        g.mu = x.rowwise().mean();
        x.colwise() -= g.mu;
        Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(s.size() - 1);
        cov.diagonal().array() += ridge;

        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) throw Error("eigen-decomposition failed");
        g.eigvecs = eig.eigenvectors();
        g.eigvals = eig.eigenvalues();
        if (!(g.eigvals.minCoeff() > 0.0)) {
            throw ValidationError("landmark " + std::to_string(i) +
                                  " covariance is singular; use a positive ridge");
        }
    }
    return model;
}

double mahalanobis(const LandmarkGaussian& g, const Descriptor& y)
{
    const Eigen::VectorXd z = g.eigvecs.transpose() * (y - g.mu);
    return (z.array().square() / g.eigvals.array()).sum();
}

Descriptor update_mean(const LandmarkGaussian& g, const Descriptor& y, double alpha)
{
    check_forgetting_factor(alpha);
    return (1.0 - alpha) * g.mu + alpha * y;
}

Eigen::VectorXd update_covariance(const LandmarkGaussian& g, const Descriptor& y, double alpha)
{
    check_forgetting_factor(alpha);
    const double residual = (y - g.mu).squaredNorm();
    return ((1.0 - alpha) * g.eigvals.array() + alpha * residual).matrix();
}

void update_gaussian(LandmarkGaussian& g, const Descriptor& y, double alpha)
{
    g.eigvals = update_covariance(g, y, alpha);
    g.mu = update_mean(g, y, alpha);
}

void update(AppearanceModel& model, const FrameObservation& obs)
{
    if (obs.descriptors.size() != model.gaussians.size() || obs.visibility.size() != model.gaussians.size()) {
        throw ValidationError("observation and appearance model sizes differ");
    }
    for (std::size_t i = 0; i < model.gaussians.size(); ++i) {
        if (obs.visibility[i]) update_gaussian(model.gaussians[i], obs.descriptors[i], model.alpha);
    }
}

namespace {

constexpr std::array<char, 8> kMagic{'F', 'T', 'A', 'P', 'P', 'E', 'A', 'R'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "serialisation assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw ParseError("appearance model truncated", 0);
    return value;
}

void put_doubles(std::ostream& out, const double* data, Eigen::Index n)
{
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::istream& in, double* data, Eigen::Index n)
{
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)))) {
        throw ParseError("appearance model truncated", 0);
    }
}

} // namespace

void save_appearance(std::ostream& out, const AppearanceModel& model)
{
    out.write(kMagic.data(), kMagic.size());
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(kDescriptorSize));
    put(out, model.alpha);
    put(out, model.ridge);
    put(out, static_cast<std::uint64_t>(model.gaussians.size()));
    for (const auto& g : model.gaussians) {
        put_doubles(out, g.mu.data(), g.mu.size());
        put_doubles(out, g.eigvals.data(), g.eigvals.size());
        put_doubles(out, g.eigvecs.data(), g.eigvecs.size());
    }
}

AppearanceModel load_appearance(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw ParseError("not a facetrack appearance model", 0);
    }
    if (get<std::uint32_t>(in) != kVersion) throw ParseError("unsupported appearance model version", 0);
    if (get<std::uint32_t>(in) != kDescriptorSize) throw ParseError("descriptor size mismatch", 0);
    AppearanceModel model;
    model.alpha = get<double>(in);
    model.ridge = get<double>(in);
    const auto count = get<std::uint64_t>(in);
    if (count > 4096) throw ParseError("implausible landmark count", 0);
    model.gaussians.resize(count);
    for (auto& g : model.gaussians) {
        get_doubles(in, g.mu.data(), g.mu.size());
        g.eigvals.resize(kDescriptorSize);
        get_doubles(in, g.eigvals.data(), g.eigvals.size());
        g.eigvecs.resize(kDescriptorSize, kDescriptorSize);
        get_doubles(in, g.eigvecs.data(), g.eigvecs.size());
    }
    return model;
}

void save_appearance_file(const std::filesystem::path& path, const AppearanceModel& model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write appearance model", path);
    save_appearance(out, model);
    if (!out) throw IoError("write failed", path);
}

AppearanceModel load_appearance_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open appearance model", path);
    return load_appearance(in);
}

} // namespace facetrack
