/*
 * facetrack - Unit tests for the config module
 *
 * File: tests/test_config.cpp
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

#include "facetrack/config.hpp"
#include "facetrack/error.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace facetrack;

namespace {

RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {})
{
    std::istringstream in(text);
    return parse_config(in, overrides);
}

} // namespace

TEST(Config, EmptyObjectGivesDefaults)
{
    const RunConfig c = parse("{}");
    EXPECT_FALSE(c.focal_px.has_value());
    EXPECT_EQ(c.tracker.alpha, 0.1);
    EXPECT_EQ(c.tracker.ridge, 1e-4);
    EXPECT_EQ(c.tracker.grid_step, 10.0);
    EXPECT_EQ(c.tracker.simplex.max_iters, 400);
    EXPECT_FALSE(c.tracker.prior.has_value());
    EXPECT_EQ(c.lost_threshold, 400.0);
    EXPECT_EQ(c.landmark_indices.size(), 26u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ReadsNestedValues)
{
    const RunConfig c = parse(R"({
        "camera": {"focal_px": 500, "cx": 100, "cy": 80},
        "tracker": {"alpha": 0.05, "grid": {"lo": -20, "hi": 20, "step": 20},
                    "simplex": {"max_iters": 50, "rng_seed": 9},
                    "psi": [1,1,1,1,1,1,1,1,1,1,1,2]},
        "eval": {"lost_threshold": 100},
        "paths": {"annotations": "a.txt"}
    })");
    EXPECT_EQ(*c.focal_px, 500.0);
    const CameraIntrinsics cam = c.camera_for(320, 240);
    EXPECT_EQ(cam.focal_px, 500.0);
    EXPECT_EQ(cam.cx, 100.0);
    EXPECT_EQ(c.tracker.alpha, 0.05);
    EXPECT_EQ(c.tracker.grid_lo, -20.0);
    EXPECT_EQ(c.tracker.simplex.max_iters, 50);
    EXPECT_EQ(c.tracker.simplex.rng_seed, 9u);
    ASSERT_TRUE(c.tracker.prior.has_value());
    EXPECT_EQ(c.tracker.prior->psi(11), 2.0);
    EXPECT_EQ(c.lost_threshold, 100.0);
    EXPECT_EQ(c.annotations, "a.txt");
}

TEST(Config, CameraDefaultsFromImageSize)
{
    const CameraIntrinsics cam = parse("{}").camera_for(640, 480);
    EXPECT_EQ(cam.focal_px, 640.0);
    EXPECT_EQ(cam.cx, 319.5);
    EXPECT_EQ(cam.cy, 239.5);
}

TEST(Config, OverridesTakePrecedence)
{
    const RunConfig c = parse(R"({"tracker": {"alpha": 0.05}})",
                              {"tracker.alpha=0.2", "tracker.simplex.max_iters=7", "paths.annotations=x y.txt",
                               "tracker.parallel=false"});
    EXPECT_EQ(c.tracker.alpha, 0.2);
    EXPECT_EQ(c.tracker.simplex.max_iters, 7);
    EXPECT_EQ(c.annotations, "x y.txt");
    EXPECT_FALSE(c.tracker.parallel);
    const RunConfig d = default_config({"eval.lost_threshold=50"});
    EXPECT_EQ(d.lost_threshold, 50.0);
}

TEST(Config, UnknownKeysAndBadTypesAreRejected)
{
    EXPECT_THROW(parse(R"({"tracker": {"alhpa": 0.1}})"), ValidationError);
    EXPECT_THROW(parse(R"({"bogus": 1})"), ValidationError);
    EXPECT_THROW(parse(R"({"tracker": {"alpha": "high"}})"), ValidationError);
    EXPECT_THROW(parse("{}", {"tracker.nope=1"}), ValidationError);
    EXPECT_THROW(parse("{}", {"no_equals_sign"}), ValidationError);
}

TEST(Config, OutOfRangeValuesFailValidation)
{
    EXPECT_THROW(parse(R"({"tracker": {"alpha": 1.5}})").validate(), ValidationError);
    EXPECT_THROW(parse(R"({"camera": {"focal_px": -1}})").validate(), ValidationError);
    EXPECT_THROW(parse(R"({"tracker": {"psi": [1, 2]}})").validate(), ValidationError);
    EXPECT_THROW(parse(R"({"model": {"anim_selection": [0, 1]}})").validate(), ValidationError);
}

TEST(Config, MalformedJsonIsAParseError)
{
    EXPECT_THROW(parse("{ \"tracker\": "), ParseError);
    EXPECT_THROW(load_config_file("/nonexistent/config.json"), IoError);
}

TEST(Config, WriteThenParseRoundTrips)
{
    const RunConfig c = parse(R"({"tracker": {"alpha": 0.07, "restarts": 2}, "eval": {"lost_threshold": 250}})");
    std::stringstream ss;
    write_config(ss, c);
    const RunConfig back = parse_config(ss);
    EXPECT_EQ(back.tracker.alpha, 0.07);
    EXPECT_EQ(back.tracker.restarts, 2);
    EXPECT_EQ(back.lost_threshold, 250.0);
}

TEST(Config, BundledModelWhenNoWireframeGiven)
{
    const WireframeModel m = parse("{}").load_model();
    EXPECT_EQ(m.num_vertices(), 113);
}
