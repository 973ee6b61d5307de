/*
 * facetrack - Unit tests for the eval module
 *
 * File: tests/test_eval.cpp
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

#include "reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace facetrack;

namespace {

std::vector<PoseAngles> random_angles(std::mt19937_64& rng, int n, double spread)
{
    std::normal_distribution<double> d(0.0, spread);
    std::vector<PoseAngles> v;
    for (int i = 0; i < n; ++i) v.push_back({d(rng), d(rng), d(rng)});
    return v;
}

} // namespace

TEST(RotationError, SquaredDegrees)
{
    EXPECT_EQ(rotation_error({3, 0, 0}, {0, 0, 0}), 9.0);
    EXPECT_EQ(rotation_error({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_EQ(rotation_error({0, 0, 0}, {1, -2, 2}), 9.0);
}

TEST(AnglesOf, MapsPanTiltRoll)
{
    PoseAnimParams b;
    b.rx = deg2rad(10);
    b.ry = deg2rad(-20);
    b.rz = deg2rad(5);
    const PoseAngles a = angles_of(b);
    EXPECT_NEAR(a.pan, -20, 1e-12);
    EXPECT_NEAR(a.tilt, 10, 1e-12);
    EXPECT_NEAR(a.roll, 5, 1e-12);
}

TEST(Metrics, MatchBruteForce)
{
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 37;
        const auto gt = random_angles(rng, n, 20.0);
        auto est = gt;
        std::normal_distribution<double> noise(0.0, trial % 3 == 0 ? 15.0 : 3.0);
        for (auto& e : est) {
            e.pan += noise(rng);
            e.tilt += noise(rng);
            e.roll += noise(rng);
        }
        const MetricsReport r = buft_metrics(est, gt, 400.0);
        const auto b = reference::brute_metrics(est, gt, 400.0);
        EXPECT_EQ(r.n_s, b.n_s);
        EXPECT_EQ(r.total, n);
        EXPECT_NEAR(r.p_s, 100.0 * b.n_s / n, 1e-12);
        if (b.n_s == 0) continue;
        EXPECT_NEAR(r.e_pan, b.pan, 1e-12);
        EXPECT_NEAR(r.e_tilt, b.tilt, 1e-12);
        EXPECT_NEAR(r.e_roll, b.roll, 1e-12);
        EXPECT_NEAR(r.e_m, b.avg, 1e-12);
    }
}

TEST(Metrics, ThresholdIsInclusive)
{
    const MetricsReport r = buft_metrics({{20, 0, 0}, {21, 0, 0}}, {{0, 0, 0}, {0, 0, 0}}, 400.0);
    EXPECT_EQ(r.n_s, 1);
    EXPECT_DOUBLE_EQ(r.p_s, 50.0);
    EXPECT_DOUBLE_EQ(r.e_pan, 20.0);
    EXPECT_EQ(r.errors.size(), 2u);
    EXPECT_DOUBLE_EQ(r.errors[1], 441.0);
}

TEST(Metrics, NoTrackedFramesGiveNaN)
{
    const MetricsReport r = buft_metrics({{90, 0, 0}}, {{0, 0, 0}}, 400.0);
    EXPECT_EQ(r.n_s, 0);
    EXPECT_EQ(r.p_s, 0.0);
    EXPECT_TRUE(std::isnan(r.e_pan));
    EXPECT_TRUE(std::isnan(r.e_m));
    std::ostringstream json;
    write_report_json(json, r);
    EXPECT_NE(json.str().find("null"), std::string::npos);
    EXPECT_NE(format_report_table(r).find("nan"), std::string::npos);
}

TEST(Metrics, LengthMismatchIsAValidationError)
{
    EXPECT_THROW(buft_metrics({{0, 0, 0}}, {}, 400.0), ValidationError);
}

TEST(Rms, OffsetThreeFourIsFive)
{
    LandmarkGT gt;
    gt.subset_map = default_subset_map();
    Points2 truth = Points2::Zero(68, 2);
    Points2 est = Points2::Zero(kNumLandmarks, 2);
    for (const auto& [g, t] : gt.subset_map) {
        truth.row(g) << 10.0 * g, 2.0 * g;
        est.row(t) = truth.row(g) + Eigen::RowVector2d(3, 4);
    }
    gt.frames.push_back(truth);
    const auto r = rms_error(std::vector<Points2>{est}, gt);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0], 5.0);
}

TEST(Rms, MatchesBruteForce)
{
    std::mt19937_64 rng(72);
    std::normal_distribution<double> n(100.0, 40.0);
    LandmarkGT gt;
    gt.subset_map = default_subset_map();
    std::vector<Points2> est;
    for (int f = 0; f < 100; ++f) {
        Points2 t(68, 2), e(kNumLandmarks, 2);
        for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = n(rng);
        for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = n(rng);
        gt.frames.push_back(t);
        est.push_back(e);
    }
    const auto r = rms_error(est, gt);
    for (int f = 0; f < 100; ++f) {
        EXPECT_NEAR(r[static_cast<std::size_t>(f)], reference::brute_rms(est[f], gt.frames[f], gt.subset_map), 1e-12);
    }
    gt.subset_map.pop_back();
    EXPECT_THROW(rms_error(est, gt), ValidationError);
}

TEST(GroundTruth, ParseWriteRoundTrip)
{
    std::istringstream in("# x y depth roll pan tilt\n1 2 3 4 5 6\n\n7 8 9 10 11 12.5\n");
    const PoseGT gt = parse_buft_gt(in);
    ASSERT_EQ(gt.size(), 2u);
    EXPECT_EQ(gt[1].tilt, 12.5);
    EXPECT_EQ(gt[0].roll, 4);
    EXPECT_EQ(gt[0].angles().pan, 5);
    std::stringstream ss;
    write_buft_gt(ss, gt);
    const PoseGT back = parse_buft_gt(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].depth, 9);
    EXPECT_EQ(back[1].tilt, 12.5);
}

TEST(GroundTruth, BadLineNumberReported)
{
    std::istringstream in("1 2 3 4 5 6\n1 2 3 4 5\n");
    try {
        parse_buft_gt(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream nan_line("1 2 3 4 5 abc\n");
    EXPECT_THROW(parse_buft_gt(nan_line), ParseError);
    EXPECT_THROW(parse_buft_gt_file("/nonexistent/gt.txt"), IoError);
}

TEST(Pts, ParseWriteRoundTrip)
{
    Points2 p(3, 2);
    p << 1.5, 2.5, 3, 4, 100.25, 7;
    std::stringstream ss;
    write_pts(ss, p);
    const Points2 back = parse_pts(ss);
    EXPECT_EQ(back, p);

    std::istringstream wrong_count("version: 1\nn_points: 3\n{\n1 2\n3 4\n}\n");
    try {
        parse_pts(wrong_count);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 6u);
    }
    std::istringstream unterminated("version: 1\nn_points: 1\n{\n1 2\n");
    EXPECT_THROW(parse_pts(unterminated), ParseError);
}

TEST(Pts, SequenceInFileNameOrder)
{
    const auto dir = std::filesystem::temp_directory_path() / "facetrack_test_pts";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (int i : {2, 0, 1}) {
        Points2 p(1, 2);
        p << i, 10 * i;
        std::ofstream out(dir / ("frame_" + std::to_string(i) + ".pts"));
        write_pts(out, p);
    }
    const LandmarkGT gt = parse_pts_sequence(dir);
    ASSERT_EQ(gt.frames.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(gt.frames[static_cast<std::size_t>(i)](0, 0), i);
    std::filesystem::remove_all(dir);
}

TEST(Report, TableListsAllColumns)
{
    const MetricsReport r = buft_metrics({{1, 2, 3}}, {{0, 0, 0}}, 400.0);
    const std::string t = format_report_table(r, "demo");
    for (const char* col : {"P_s", "E_pan", "E_tilt", "E_roll", "E_avg", "demo", "400"}) {
        EXPECT_NE(t.find(col), std::string::npos) << col;
    }
    std::ostringstream json;
    write_report_json(json, r);
    EXPECT_NE(json.str().find("\"E_pan\""), std::string::npos);
}
