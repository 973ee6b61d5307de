/*
 * facetrack - Unit tests for the appearance module
 *
 * File: tests/test_appearance.cpp
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

#include "reference.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

using namespace facetrack;

namespace {

Descriptor random_descriptor(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 0.3);
    Descriptor d;
    for (auto& v : d) v = u(rng);
    return d;
}

LandmarkGaussian random_gaussian(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd a(kDescriptorSize, kDescriptorSize);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = n(rng);
    const Eigen::MatrixXd cov = a * a.transpose() / kDescriptorSize + 0.05 * Eigen::MatrixXd::Identity(128, 128);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    LandmarkGaussian g;
    g.mu = random_descriptor(rng);
    g.eigvecs = eig.eigenvectors();
    g.eigvals = eig.eigenvalues();
    return g;
}

LandmarkGaussian identity_gaussian()
{
    LandmarkGaussian g;
    g.eigvecs = Eigen::MatrixXd::Identity(128, 128);
    g.eigvals = Eigen::VectorXd::Ones(128);
    return g;
}

} // namespace

TEST(Train, MatchesTwoPassMeanAndCovariance)
{
    std::mt19937_64 rng(31);
    std::vector<std::vector<Descriptor>> samples(3);
    for (auto& s : samples)
        for (int k = 0; k < 40; ++k) s.push_back(random_descriptor(rng));
    const AppearanceModel m = train(samples, 0.1, 1e-4);
    ASSERT_EQ(m.gaussians.size(), 3u);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Descriptor mean = Descriptor::Zero();
        for (const auto& d : samples[i]) mean += d;
        mean /= static_cast<double>(samples[i].size());
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(128, 128);
        for (const auto& d : samples[i]) cov += (d - mean) * (d - mean).transpose();
        cov /= static_cast<double>(samples[i].size() - 1);
        cov.diagonal().array() += 1e-4;
        const auto& g = m.gaussians[i];
        EXPECT_LE((g.mu - mean).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((g.covariance() - cov).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((g.eigvecs.transpose() * g.eigvecs - Eigen::MatrixXd::Identity(128, 128)).cwiseAbs().maxCoeff(),
                  1e-8);
        EXPECT_GT(g.eigvals.minCoeff(), 0.0);
    }
}

TEST(Train, IdenticalSamplesGiveRidgeCovariance)
{
    std::mt19937_64 rng(32);
    const Descriptor d = random_descriptor(rng);
    const AppearanceModel m = train({{d, d, d}}, 0.1, 1e-3);
    EXPECT_LE((m.gaussians[0].eigvals.array() - 1e-3).abs().maxCoeff(), 1e-15);
    EXPECT_LE((m.gaussians[0].mu - d).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Train, RejectsTooFewSamplesAndBadParameters)
{
    std::mt19937_64 rng(33);
    const Descriptor d = random_descriptor(rng);
    EXPECT_THROW(train({{d, d}, {d}}, 0.1, 1e-4), ValidationError);
    EXPECT_THROW(train({{d, d}}, 0.0, 1e-4), ValidationError);
    EXPECT_THROW(train({{d, d}}, 1.0, 1e-4), ValidationError);
    EXPECT_THROW(train({{d, d}}, 0.1, -1.0), ValidationError);
    EXPECT_THROW(train({{d, d}}, 0.1, 0.0), ValidationError);
}

TEST(Mahalanobis, TrivialCases)
{
    std::mt19937_64 rng(34);
    const LandmarkGaussian g = random_gaussian(rng);
    EXPECT_EQ(mahalanobis(g, g.mu), 0.0);
    LandmarkGaussian id = identity_gaussian();
    id.mu = random_descriptor(rng);
    const Descriptor y = random_descriptor(rng);
    EXPECT_NEAR(mahalanobis(id, y), (y - id.mu).squaredNorm(), 1e-14);
}

TEST(Mahalanobis, MatchesDenseSolve)
{
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const LandmarkGaussian g = random_gaussian(rng);
        const Descriptor y = random_descriptor(rng);
        const double oracle = reference::dense_mahalanobis(g.covariance(), g.mu, y);
        EXPECT_LE(std::abs(mahalanobis(g, y) - oracle), 1e-8 * oracle);
    }
}

TEST(UpdateMean, ArithmeticAndFixedPoint)
{
    LandmarkGaussian g = identity_gaussian();
    const Descriptor two = Descriptor::Constant(2.0);
    EXPECT_EQ(update_mean(g, two, 0.5), Descriptor::Ones());
    g.mu = two;
    EXPECT_EQ(update_mean(g, two, 0.3), two);
    EXPECT_THROW(update_mean(g, two, 0.0), ValidationError);
    EXPECT_THROW(update_mean(g, two, 1.5), ValidationError);
}

TEST(UpdateMean, ConvergesGeometrically)
{
    std::mt19937_64 rng(36);
    LandmarkGaussian g = identity_gaussian();
    g.mu = random_descriptor(rng);
    const Descriptor y = random_descriptor(rng);
    const double alpha = 0.2;
    double err = (g.mu - y).norm();
    for (int step = 0; step < 30; ++step) {
        g.mu = update_mean(g, y, alpha);
        const double next = (g.mu - y).norm();
        EXPECT_NEAR(next / err, 1.0 - alpha, 1e-9);
        err = next;
    }
}

TEST(UpdateCovariance, Arithmetic)
{
    LandmarkGaussian g = identity_gaussian();
    Descriptor y = Descriptor::Zero();
    y(0) = 1;
    y(1) = 1;
    y(2) = 1; // |y - mu|^2 = 3
    const Eigen::VectorXd s = update_covariance(g, y, 0.5);
    EXPECT_LE((s.array() - 2.0).abs().maxCoeff(), 1e-15);

    std::mt19937_64 rng(37);
    const LandmarkGaussian r = random_gaussian(rng);
    const Eigen::VectorXd shrunk = update_covariance(r, r.mu, 0.25);
    EXPECT_LE((shrunk - 0.75 * r.eigvals).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(UpdateCovariance, ResidualUsesPreUpdateMean)
{
    LandmarkGaussian g = identity_gaussian();
    const Descriptor y = Descriptor::Constant(0.5);
    update_gaussian(g, y, 0.5);
    // residual 128 * 0.25 = 32 against mu = 0, eigenvalues 0.5 + 16
    EXPECT_NEAR(g.eigvals(0), 16.5, 1e-12);
    EXPECT_NEAR(g.mu(0), 0.25, 1e-15);
}

TEST(UpdateCovariance, StaysSpdWithFixedEigenvectors)
{
    std::mt19937_64 rng(38);
    std::uniform_real_distribution<double> a(0.01, 0.99);
    LandmarkGaussian g = random_gaussian(rng);
    const Eigen::MatrixXd u0 = g.eigvecs;
    for (int step = 0; step < 2000; ++step) {
        const double alpha = a(rng);
        const double before = g.eigvals.minCoeff();
        update_gaussian(g, random_descriptor(rng), alpha);
        ASSERT_GT(g.eigvals.minCoeff(), 0.0);
        ASSERT_GE(g.eigvals.minCoeff(), (1 - alpha) * before);
    }
    EXPECT_EQ((g.eigvecs - u0).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.covariance());
    Eigen::VectorXd sorted = g.eigvals;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_LE((eig.eigenvalues() - sorted).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Update, MasksInvisibleLandmarks)
{
    std::mt19937_64 rng(39);
    AppearanceModel m;
    m.alpha = 0.3;
    for (int i = 0; i < 4; ++i) m.gaussians.push_back(random_gaussian(rng));
    const AppearanceModel before = m;

    FrameObservation none;
    none.descriptors.assign(4, Descriptor::Zero());
    none.visibility.assign(4, false);
    update(m, none);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(m.gaussians[i].mu, before.gaussians[i].mu);
        EXPECT_EQ(m.gaussians[i].eigvals, before.gaussians[i].eigvals);
    }

    FrameObservation obs;
    obs.visibility = {true, false, true, true};
    for (int i = 0; i < 4; ++i) obs.descriptors.push_back(random_descriptor(rng));
    obs.descriptors[3] = m.gaussians[3].mu;
    update(m, obs);
    for (int i = 0; i < 4; ++i) {
        const auto& g0 = before.gaussians[i];
        const auto& g1 = m.gaussians[i];
        if (!obs.visibility[i]) {
            EXPECT_EQ(g1.mu, g0.mu);
            EXPECT_EQ(g1.eigvals, g0.eigvals);
            continue;
        }
        const Descriptor& y = obs.descriptors[i];
        const double r = (y - g0.mu).squaredNorm();
        for (int k = 0; k < 128; ++k) {
            EXPECT_NEAR(g1.mu(k), 0.7 * g0.mu(k) + 0.3 * y(k), 1e-15);
            EXPECT_NEAR(g1.eigvals(k), 0.7 * g0.eigvals(k) + 0.3 * r, 1e-15);
        }
    }
    EXPECT_LE((m.gaussians[3].mu - before.gaussians[3].mu).cwiseAbs().maxCoeff(), 1e-15);

    obs.visibility.pop_back();
    EXPECT_THROW(update(m, obs), ValidationError);
}

TEST(Update, CommutesWithLandmarkPermutation)
{
    std::mt19937_64 rng(40);
    AppearanceModel a;
    for (int i = 0; i < 3; ++i) a.gaussians.push_back(random_gaussian(rng));
    FrameObservation obs;
    obs.visibility = {true, true, true};
    for (int i = 0; i < 3; ++i) obs.descriptors.push_back(random_descriptor(rng));
    AppearanceModel b = a;
    std::swap(b.gaussians[0], b.gaussians[2]);
    FrameObservation pobs = obs;
    std::swap(pobs.descriptors[0], pobs.descriptors[2]);
    update(a, obs);
    update(b, pobs);
    EXPECT_EQ(a.gaussians[0].mu, b.gaussians[2].mu);
    EXPECT_EQ(a.gaussians[2].eigvals, b.gaussians[0].eigvals);
}

TEST(Serialization, RoundTripIsLossless)
{
    std::mt19937_64 rng(41);
    AppearanceModel m;
    m.alpha = 0.07;
    m.ridge = 3e-5;
    for (int i = 0; i < 3; ++i) m.gaussians.push_back(random_gaussian(rng));
    std::stringstream ss;
    save_appearance(ss, m);
    const AppearanceModel back = load_appearance(ss);
    EXPECT_EQ(back.alpha, m.alpha);
    EXPECT_EQ(back.ridge, m.ridge);
    ASSERT_EQ(back.gaussians.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_LE((back.gaussians[i].mu - m.gaussians[i].mu).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((back.gaussians[i].eigvals - m.gaussians[i].eigvals).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((back.gaussians[i].eigvecs - m.gaussians[i].eigvecs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Serialization, TruncatedAndForeignInputAreParseErrors)
{
    std::mt19937_64 rng(42);
    AppearanceModel m;
    m.gaussians.push_back(random_gaussian(rng));
    std::stringstream ss;
    save_appearance(ss, m);
    const std::string bytes = ss.str();
    std::istringstream cut(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(load_appearance(cut), ParseError);
    std::istringstream junk("not an appearance model at all");
    EXPECT_THROW(load_appearance(junk), ParseError);
    EXPECT_THROW(load_appearance_file("/nonexistent/appearance.bin"), IoError);
}
