/*
 * facetrack - Unit tests for the tracker module
 *
 * File: tests/test_tracker.cpp
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

#include "facetrack/error.hpp"
#include "facetrack/eval.hpp"
#include "facetrack/synthetic.hpp"
#include "facetrack/tracker.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace facetrack;

namespace {

struct Fixture
{
    WireframeModel model = bundled_model();
    CameraIntrinsics cam = CameraIntrinsics::for_image(320, 240);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(model.num_shape_units());
    PoseAnimParams b0;
    GrayImage frame;
    InitResult init;
    TrackerConfig cfg;

    Fixture()
    {
        b0.tz = 6.0;
        b0.ry = deg2rad(4);
        b0.rx = deg2rad(-3);
        frame = SyntheticFace{}.render(model, sigma, b0, cam);
        init.b0 = b0;
        init.sigma0 = sigma;
        cfg.grid_lo = -10;
        cfg.grid_hi = 10;
        cfg.grid_step = 10;
        cfg.simplex.max_iters = 150;
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

/// Gaussians whose means are exactly the descriptors observed at b.
AppearanceModel means_at(const Fixture& f, const PoseAnimParams& b, double patch_scale)
{
    const PosedLandmarks lm = posed_landmarks(f.model, f.sigma, b, f.cam);
    const FrameObservation obs = observe(f.frame, lm.pixels, lm.visibility, patch_scale);
    AppearanceModel m;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < kNumLandmarks; ++k) {
        LandmarkGaussian g;
        g.mu = obs.descriptors[static_cast<std::size_t>(k)];
        g.eigvecs = Eigen::MatrixXd::Identity(128, 128);
        g.eigvals = Eigen::VectorXd::Constant(128, 0.01 + 0.001 * k);
        m.gaussians.push_back(g);
    }
    return m;
}

EnergyContext context(const Fixture& f, const AppearanceModel& app, const StateVector& psi, double patch_scale)
{
    EnergyContext ctx;
    ctx.frame = &f.frame;
    ctx.model = &f.model;
    ctx.sigma = &f.sigma;
    ctx.appearance = &app;
    ctx.cam = &f.cam;
    ctx.prior_b = f.b0;
    ctx.psi = psi;
    ctx.patch_scale = patch_scale;
    return ctx;
}

double patch_at(const Fixture& f, const PoseAnimParams& b)
{
    return patch_scale_for(posed_landmarks(f.model, f.sigma, b, f.cam).pixels, 0.4);
}

} // namespace

TEST(Prior, DefaultsFollowDepthAndFocal)
{
    const EvolutionPrior p = EvolutionPrior::defaults_for(6.0, 320.0);
    EXPECT_NEAR(p.psi(0), std::pow(deg2rad(3), 2), 1e-15);
    EXPECT_NEAR(p.psi(1), std::pow(deg2rad(3), 2), 1e-15);
    EXPECT_NEAR(p.psi(2), std::pow(deg2rad(2), 2), 1e-15);
    EXPECT_NEAR(p.psi(3), std::pow(5.0 * 6.0 / 320.0, 2), 1e-15);
    EXPECT_NEAR(p.psi(5), std::pow(0.12, 2), 1e-15);
    EXPECT_NEAR(p.psi(6), 0.01, 1e-15);
    EvolutionPrior bad = p;
    bad.psi(4) = 0.0;
    EXPECT_THROW(bad.validate(), ValidationError);

    TrackerConfig cfg;
    const SimplexConfig s = resolve_simplex(cfg, p);
    EXPECT_EQ(s.n_vertices(), 13);
    EXPECT_LE((s.init_spread - p.psi.cwiseSqrt()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Energy, ZeroAtMeansAndPrior)
{
    const Fixture& f = fixture();
    const double ps = patch_at(f, f.b0);
    const AppearanceModel app = means_at(f, f.b0, ps);
    const EnergyContext ctx = context(f, app, StateVector::Ones(), ps);
    const EnergyTerms t = energy_terms(f.b0, ctx);
    EXPECT_EQ(t.n_visible, kNumLandmarks);
    EXPECT_EQ(t.data, 0.0);
    EXPECT_EQ(t.prior, 0.0);
    EXPECT_EQ(energy(f.b0, ctx), 0.0);
}

TEST(Energy, PriorOnlyWhenDescriptorsMatchMeans)
{
    const Fixture& f = fixture();
    PoseAnimParams b = f.b0;
    b.anim[3] = 0.0; // anim parameters with no effect on this face keep descriptors equal
    PoseAnimParams prior_b = f.b0;
    prior_b.rx += 0.02;
    prior_b.tx -= 0.05;
    const double ps = patch_at(f, f.b0);
    const AppearanceModel app = means_at(f, b, ps);
    StateVector psi = StateVector::Constant(0.5);
    EnergyContext ctx = context(f, app, psi, ps);
    ctx.prior_b = prior_b;
    const double expected = (0.02 * 0.02 + 0.05 * 0.05) / 0.5;
    EXPECT_NEAR(energy(b, ctx), expected, 1e-15);
}

TEST(Energy, RecomposesFromMahalanobisAndPrior)
{
    const Fixture& f = fixture();
    const AppearanceModel app = learn_appearance(f.frame, f.model, f.init, f.cam, f.cfg);
    const EvolutionPrior prior = resolve_prior(f.cfg, f.b0, f.cam);
    const double ps = patch_at(f, f.b0);
    const EnergyContext ctx = context(f, app, prior.psi, ps);
    std::mt19937_64 rng(61);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        StateVector v = f.b0.to_vector();
        for (int i = 0; i < kStateDims; ++i) v(i) += n(rng) * std::sqrt(prior.psi(i));
        const PoseAnimParams b = PoseAnimParams::from_vector(v);
        const PosedLandmarks lm = posed_landmarks(f.model, f.sigma, b, f.cam);
        const FrameObservation obs = observe(f.frame, lm.pixels, lm.visibility, ps);
        double data = 0.0;
        for (int k = 0; k < kNumLandmarks; ++k) {
            if (obs.visibility[static_cast<std::size_t>(k)]) {
                data += mahalanobis(app.gaussians[static_cast<std::size_t>(k)],
                                    obs.descriptors[static_cast<std::size_t>(k)]);
            }
        }
        data *= static_cast<double>(kNumLandmarks) / obs.num_visible();
        const StateVector d = v - f.b0.to_vector();
        const double pr = (d.array().square() / prior.psi.array()).sum();
        const double e = energy(b, ctx);
        EXPECT_NEAR(e, data + pr, 1e-9 * (data + pr)) << "trial " << trial;
    }
}

TEST(Energy, WrapsAngleDifferencesAndHandlesInfeasibility)
{
    const Fixture& f = fixture();
    const double ps = patch_at(f, f.b0);
    const AppearanceModel app = means_at(f, f.b0, ps);
    EnergyContext ctx = context(f, app, StateVector::Ones(), ps);
    ctx.prior_b.rz = std::numbers::pi - 0.01;
    PoseAnimParams b = f.b0;
    b.rz = -std::numbers::pi + 0.01;
    EXPECT_NEAR(energy_terms(b, ctx).prior, 0.02 * 0.02, 1e-12);

    PoseAnimParams behind = f.b0;
    behind.tz = -6.0;
    EXPECT_TRUE(std::isinf(energy(behind, ctx)));
    EnergyTerms t;
    t.n_visible = 5;
    EXPECT_TRUE(std::isinf(t.total(6)));
    t.n_visible = 6;
    EXPECT_EQ(t.total(6), 0.0);
}

TEST(TrackFrame, FrameAtPreviousStateStaysPut)
{
    const Fixture& f = fixture();
    TrackerState state;
    state.b_hat = f.b0;
    state.appearance = learn_appearance(f.frame, f.model, f.init, f.cam, f.cfg);
    const EvolutionPrior prior = resolve_prior(f.cfg, f.b0, f.cam);
    const auto [next, result] = track_frame(state, f.frame, f.model, f.sigma, f.cam, prior, f.cfg);
    const PoseAngles a = angles_of(f.b0);
    const PoseAngles b = angles_of(result.b);
    EXPECT_LT(std::sqrt(rotation_error(a, b)), 1.0);
    EXPECT_EQ(next.frame_index, state.frame_index + 1);
    EXPECT_EQ(next.b_hat, result.b);
    EXPECT_EQ(result.landmarks.rows(), kNumLandmarks);
    // The optimum is never worse than staying at the previous state.
    const double e_prev = energy(f.b0, f.frame, f.model, f.sigma, state.appearance, f.b0, prior.psi, f.cam);
    EXPECT_LE(result.energy, e_prev);
}

TEST(TrackFrame, StaticFramesDriftLessThanHalfADegree)
{
    const Fixture& f = fixture();
    SequenceTracker tracker(f.model, f.init, f.cam, f.cfg);
    tracker.start(f.frame, "f0");
    FrameResult last;
    for (int t = 1; t <= 10; ++t) last = tracker.step(f.frame, "f" + std::to_string(t));
    EXPECT_LT(std::sqrt(rotation_error(angles_of(f.b0), angles_of(last.b))), 0.5);
    EXPECT_EQ(tracker.state().frame_index, 10);
}

TEST(TrackFrame, AllLandmarksInvisibleLosesTracking)
{
    const Fixture& f = fixture();
    TrackerState state;
    state.b_hat = f.b0;
    state.b_hat.tz = -6.0; // whole face behind the camera
    state.appearance = means_at(f, f.b0, patch_at(f, f.b0));
    const EvolutionPrior prior = resolve_prior(f.cfg, f.b0, f.cam);
    try {
        track_frame(state, f.frame, f.model, f.sigma, f.cam, prior, f.cfg);
        FAIL() << "expected TrackingLostError";
    } catch (const TrackingLostError& e) {
        EXPECT_EQ(e.last_good_state().b_hat, state.b_hat);
    } catch (const ValidationError&) {
        // a degenerate patch scale is an acceptable way to refuse this state
    }
}

TEST(TrackSequence, SingleFrameReturnsInitialPose)
{
    const Fixture& f = fixture();
    const Trajectory t = track_sequence({f.frame}, f.model, f.init, f.cam, f.cfg, {"only"});
    ASSERT_EQ(t.frames.size(), 1u);
    EXPECT_EQ(t.frames[0].b, f.b0);
    EXPECT_EQ(t.frames[0].frame_id, "only");
    EXPECT_FALSE(t.lost_frame.has_value());
}

TEST(TrackSequence, DeterministicGivenSeed)
{
    const Fixture& f = fixture();
    SyntheticMotion motion;
    motion.frames = 4;
    const SyntheticSequence seq = make_sequence(f.model, motion);
    InitResult init;
    init.b0 = seq.truth[0];
    init.sigma0 = seq.sigma;
    TrackerConfig cfg = f.cfg;
    cfg.simplex.max_iters = 60;
    const Trajectory a = track_sequence(seq.frames, f.model, init, seq.cam, cfg);
    cfg.parallel = !cfg.parallel;
    const Trajectory b = track_sequence(seq.frames, f.model, init, seq.cam, cfg);
    ASSERT_EQ(a.frames.size(), 4u);
    ASSERT_EQ(b.frames.size(), 4u);
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        EXPECT_EQ(a.frames[i].b, b.frames[i].b);
        EXPECT_EQ(a.frames[i].energy, b.frames[i].energy);
    }

    std::stringstream ss;
    write_trajectory(ss, a);
    const Trajectory back = read_trajectory(ss);
    ASSERT_EQ(back.frames.size(), a.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        const StateVector d = back.frames[i].b.to_vector() - a.frames[i].b.to_vector();
        EXPECT_LE(d.cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((back.frames[i].landmarks - a.frames[i].landmarks).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_EQ(back.frames[i].n_visible, a.frames[i].n_visible);
    }
}

TEST(Trajectory, MalformedRowReportsLine)
{
    std::stringstream ss;
    Trajectory t;
    FrameResult r;
    r.b.tz = 5;
    r.landmarks = Points2::Zero(kNumLandmarks, 2);
    r.frame_id = "a";
    t.frames.push_back(r);
    write_trajectory(ss, t);
    std::string text = ss.str() + "b,1,2\n";
    std::istringstream in(text);
    try {
        read_trajectory(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Config, TrackerValidation)
{
    TrackerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.alpha = 1.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = TrackerConfig{};
    cfg.grid_step = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = TrackerConfig{};
    cfg.min_visible = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}
