/*
 * facetrack - JSON configuration loading and validation
 *
 * File: core/include/facetrack/config.hpp
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
#include "facetrack/posit.hpp"
#include "facetrack/tracker.hpp"
#include "facetrack/wireframe.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace facetrack {

/**
 * Everything the command-line pipeline needs, read from one JSON document.
 * Keys are grouped as camera, model, init, tracker, eval and paths; see
 * the README for the schema. Relative paths are taken as given (relative
 * to the working directory).
 */
struct RunConfig
{
    // camera: unset values fall back to CameraIntrinsics::for_image
    std::optional<double> focal_px;
    std::optional<double> cx;
    std::optional<double> cy;

    // model
    std::filesystem::path wireframe; ///< empty: the bundled wireframe
    std::vector<int> landmark_indices{kDefaultLandmarkIndices.begin(), kDefaultLandmarkIndices.end()};
    std::vector<int> anim_selection{kDefaultAnimSelection.begin(), kDefaultAnimSelection.end()};

    InitOptions init;
    TrackerConfig tracker;

    // eval
    double lost_threshold = 400.0;
    std::vector<std::pair<int, int>> subset_map; ///< empty: default_subset_map()

    // paths
    std::filesystem::path annotations;    ///< frame-0 landmark annotations
    std::filesystem::path init_result;    ///< written by init, read by track and render-db
    std::filesystem::path ground_truth;   ///< pose ground truth for eval
    std::filesystem::path landmark_truth; ///< directory of .pts files for eval

    CameraIntrinsics camera_for(int width, int height) const;
    WireframeModel load_model() const;
    /// Range checks of every module the values feed.
    void validate() const;
};

/**
 * Parses a JSON configuration, then applies "dotted.key=value" overrides
 * (value parsed as JSON, else taken as a string). Unknown keys and wrong
 * types throw ValidationError; malformed JSON throws ParseError.
 */
RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
RunConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Defaults plus overrides, for running without a config file.
RunConfig default_config(const std::vector<std::string>& overrides = {});
/// The effective configuration as JSON.
void write_config(std::ostream& out, const RunConfig& cfg);

} // namespace facetrack
