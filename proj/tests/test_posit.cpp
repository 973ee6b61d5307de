/*
 * facetrack - Unit tests for the posit module
 *
 * File: tests/test_posit.cpp
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
#include "facetrack/geometry.hpp"
#include "facetrack/posit.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <random>
#include <sstream>

using namespace facetrack;

namespace {

Points3 landmark_points(const WireframeModel& m)
{
    Points3 p(kNumLandmarks, 3);
    for (int k = 0; k < kNumLandmarks; ++k) p.row(k) = m.mean_shape.row(m.landmark_indices[static_cast<std::size_t>(k)]);
    return p;
}

double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b)
{
    return rad2deg(Eigen::AngleAxisd(a.transpose() * b).angle());
}

} // namespace

TEST(Posit, RecoversRandomNoiselessPoses)
{
    const WireframeModel m = bundled_model();
    const Points3 obj = landmark_points(m);
    const CameraIntrinsics cam = CameraIntrinsics::for_image(640, 480);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-deg2rad(40), deg2rad(40));
    std::uniform_real_distribution<double> depth(4.0, 10.0);
    std::uniform_real_distribution<double> off(-0.5, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Matrix3d r = rotation_matrix(ang(rng), ang(rng), ang(rng));
        const Eigen::Vector3d t(off(rng), off(rng), depth(rng));
        const Points3 cam_pts = (obj * r.transpose()).rowwise() + t.transpose();
        const Projection proj = project(cam_pts, cam);
        const RigidPose pose = posit(obj, proj.pixels, cam);
        EXPECT_LE(rotation_angle_deg(pose.rotation, r), 0.5) << "trial " << trial;
        EXPECT_LE((pose.translation - t).norm() / t.norm(), 0.01) << "trial " << trial;
    }
}

TEST(Posit, CoplanarObjectPointsAreARankError)
{
    Points3 obj(5, 3);
    obj << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0, 0.5, 0.3, 0;
    Points2 img(5, 2);
    img << 100, 100, 120, 100, 100, 120, 120, 120, 110, 106;
    EXPECT_THROW(posit(obj, img, CameraIntrinsics::for_image(320, 240)), RankError);
}

TEST(Posit, InputShapeErrorsAreValidationErrors)
{
    Points3 obj(3, 3);
    obj.setRandom();
    Points2 img(3, 2);
    img.setRandom();
    EXPECT_THROW(posit(obj, img, CameraIntrinsics::for_image(320, 240)), ValidationError);
    Points3 obj4(4, 3);
    obj4.setRandom();
    EXPECT_THROW(posit(obj4, img, CameraIntrinsics::for_image(320, 240)), ValidationError);
}

TEST(Annotations, ParseValidAndReportBadLine)
{
    std::istringstream good("# comment\n0 10 20\n5 11.5 21.5\n");
    const AnnotationSet a = read_annotations(good, "f0");
    ASSERT_EQ(a.entries.size(), 2u);
    EXPECT_EQ(a.entries[1].ordinal, 5);
    EXPECT_DOUBLE_EQ(a.entries[1].u, 11.5);

    std::istringstream bad("0 10 20\n1 x 3\n");
    try {
        read_annotations(bad);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Annotations, ValidationRules)
{
    AnnotationSet a;
    for (int k = 0; k < 5; ++k) a.entries.push_back({k, 10.0 * k, 5.0});
    EXPECT_THROW(a.validate(), ValidationError);
    a.entries.push_back({5, 1, 1});
    EXPECT_NO_THROW(a.validate());
    a.entries.push_back({5, 2, 2});
    EXPECT_THROW(a.validate(), ValidationError);
    a.entries.back().ordinal = 26;
    EXPECT_THROW(a.validate(), ValidationError);
}

TEST(Annotations, MissingFileIsAnIoError)
{
    EXPECT_THROW(read_annotations_file("/nonexistent/annotations.txt"), IoError);
}

TEST(Initialize, RecoversPoseFromExactLandmarks)
{
    const WireframeModel m = bundled_model();
    const CameraIntrinsics cam = CameraIntrinsics::for_image(320, 240);
    PoseAnimParams truth;
    truth.rx = deg2rad(10);
    truth.ry = deg2rad(-15);
    truth.rz = deg2rad(5);
    truth.tx = 0.2;
    truth.ty = -0.1;
    truth.tz = 6.0;
    const Projection p = landmark_positions(m, Eigen::VectorXd::Zero(m.num_shape_units()), truth, cam);
    AnnotationSet a;
    for (int k = 0; k < kNumLandmarks; ++k) a.entries.push_back({k, p.pixels(k, 0), p.pixels(k, 1)});

    const InitResult init = initialize(m, a, cam);
    EXPECT_NEAR(rad2deg(init.b0.rx), 10.0, 0.5);
    EXPECT_NEAR(rad2deg(init.b0.ry), -15.0, 0.5);
    EXPECT_NEAR(rad2deg(init.b0.rz), 5.0, 0.5);
    EXPECT_NEAR(init.b0.tz, 6.0, 0.06);
    EXPECT_LT(init.reproj_rmse, 0.5);
    EXPECT_FALSE(init.rmse_warning);
    for (const double v : init.b0.anim) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(init.sigma0.size(), m.num_shape_units());

    std::stringstream ss;
    write_init_result(ss, init);
    const InitResult back = read_init_result(ss);
    EXPECT_NEAR(back.b0.rx, init.b0.rx, 1e-12);
    EXPECT_NEAR(back.b0.tz, init.b0.tz, 1e-12);
    EXPECT_NEAR(back.reproj_rmse, init.reproj_rmse, 1e-12);
}

TEST(Initialize, PerturbedAnnotationsRaiseRmseWarning)
{
    const WireframeModel m = bundled_model();
    const CameraIntrinsics cam = CameraIntrinsics::for_image(320, 240);
    PoseAnimParams truth;
    truth.tz = 6.0;
    const Projection p = landmark_positions(m, Eigen::VectorXd::Zero(m.num_shape_units()), truth, cam);
    AnnotationSet a;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 12.0);
    for (int k = 0; k < kNumLandmarks; ++k) a.entries.push_back({k, p.pixels(k, 0) + n(rng), p.pixels(k, 1) + n(rng)});
    const InitResult init = initialize(m, a, cam);
    EXPECT_GT(init.reproj_rmse, 5.0);
    EXPECT_TRUE(init.rmse_warning);
}
