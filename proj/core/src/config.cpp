/*
 * facetrack - JSON configuration loading and validation
 *
 * File: core/src/config.cpp
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

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace facetrack {

namespace {

using nlohmann::ordered_json;

template <typename T>
ordered_json optional_json(const std::optional<T>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json vector_json(const Eigen::VectorXd& v)
{
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ordered_json to_json(const RunConfig& c)
{
    ordered_json j;
    j["camera"] = {{"focal_px", optional_json(c.focal_px)}, {"cx", optional_json(c.cx)}, {"cy", optional_json(c.cy)}};
    j["model"] = {{"wireframe", c.wireframe.string()},
                  {"landmark_indices", c.landmark_indices},
                  {"anim_selection", c.anim_selection}};
    j["init"] = {{"refine_shape", c.init.refine_shape},
                 {"refine_rounds", c.init.refine_rounds},
                 {"shape_regularization", c.init.shape_regularization},
                 {"rmse_warning_px", c.init.rmse_warning_px},
                 {"posit_tolerance", c.init.posit.tolerance},
                 {"posit_max_iterations", c.init.posit.max_iterations}};
    const auto& t = c.tracker;
    j["tracker"] = {
        {"alpha", t.alpha},
        {"ridge", t.ridge},
        {"psi", t.prior ? vector_json(t.prior->psi) : ordered_json(nullptr)},
        {"patch_scale_factor", t.patch_scale_factor},
        {"grid", {{"lo", t.grid_lo}, {"hi", t.grid_hi}, {"step", t.grid_step}}},
        {"min_visible", t.min_visible},
        {"restarts", t.restarts},
        {"parallel", t.parallel},
        {"simplex",
         {{"init_spread", t.simplex.init_spread.size() ? vector_json(t.simplex.init_spread) : ordered_json(nullptr)},
          {"max_iters", t.simplex.max_iters},
          {"f_tol", t.simplex.f_tol},
          {"x_tol", t.simplex.x_tol},
          {"rng_seed", t.simplex.rng_seed}}}};
    ordered_json map = ordered_json::array();
    for (const auto& [g, o] : c.subset_map) map.push_back({g, o});
    j["eval"] = {{"lost_threshold", c.lost_threshold}, {"subset_map", map}};
    j["paths"] = {{"annotations", c.annotations.string()},
                  {"init_result", c.init_result.string()},
                  {"ground_truth", c.ground_truth.string()},
                  {"landmark_truth", c.landmark_truth.string()}};
    return j;
}

/// Nullable leaves (optional values) accept any type; everything else must
/// already exist in the defaults.
void overlay(ordered_json& base, const ordered_json& patch, const std::string& where)
{
    if (!patch.is_object()) throw ValidationError("configuration " + (where.empty() ? "root" : where) + " must be an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (!base.contains(key)) throw ValidationError("unknown configuration key '" + path + "'");
        auto& slot = base[key];
        if (slot.is_object()) {
            overlay(slot, value, path);
        } else {
            slot = value;
        }
    }
}

std::optional<double> optional_number(const ordered_json& v)
{
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

std::optional<Eigen::VectorXd> optional_vector(const ordered_json& v, const char* name)
{
    if (v.is_null()) return std::nullopt;
    const auto values = v.get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(kStateDims)) {
        throw ValidationError(std::string(name) + " must have 12 entries");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), kStateDims);
}

RunConfig from_json(const ordered_json& j)
{
    RunConfig c;
    try {
        c.focal_px = optional_number(j["camera"]["focal_px"]);
        c.cx = optional_number(j["camera"]["cx"]);
        c.cy = optional_number(j["camera"]["cy"]);
        c.wireframe = j["model"]["wireframe"].get<std::string>();
        c.landmark_indices = j["model"]["landmark_indices"].get<std::vector<int>>();
        c.anim_selection = j["model"]["anim_selection"].get<std::vector<int>>();

        const auto& ji = j["init"];
        c.init.refine_shape = ji["refine_shape"].get<bool>();
        c.init.refine_rounds = ji["refine_rounds"].get<int>();
        c.init.shape_regularization = ji["shape_regularization"].get<double>();
        c.init.rmse_warning_px = ji["rmse_warning_px"].get<double>();
        c.init.posit.tolerance = ji["posit_tolerance"].get<double>();
        c.init.posit.max_iterations = ji["posit_max_iterations"].get<int>();

        const auto& jt = j["tracker"];
        auto& t = c.tracker;
        t.alpha = jt["alpha"].get<double>();
        t.ridge = jt["ridge"].get<double>();
        if (auto psi = optional_vector(jt["psi"], "tracker.psi")) {
            t.prior = EvolutionPrior{};
            t.prior->psi = *psi;
        }
        t.patch_scale_factor = jt["patch_scale_factor"].get<double>();
        t.grid_lo = jt["grid"]["lo"].get<double>();
        t.grid_hi = jt["grid"]["hi"].get<double>();
        t.grid_step = jt["grid"]["step"].get<double>();
        t.min_visible = jt["min_visible"].get<int>();
        t.restarts = jt["restarts"].get<int>();
        t.parallel = jt["parallel"].get<bool>();
        const auto& js = jt["simplex"];
        if (auto spread = optional_vector(js["init_spread"], "tracker.simplex.init_spread")) {
            t.simplex.init_spread = *spread;
        }
        t.simplex.max_iters = js["max_iters"].get<int>();
        t.simplex.f_tol = js["f_tol"].get<double>();
        t.simplex.x_tol = js["x_tol"].get<double>();
        t.simplex.rng_seed = js["rng_seed"].get<std::uint64_t>();

        c.lost_threshold = j["eval"]["lost_threshold"].get<double>();
        for (const auto& pair : j["eval"]["subset_map"]) {
            const auto p = pair.get<std::vector<int>>();
            if (p.size() != 2) throw ValidationError("eval.subset_map entries must be [annotation_index, ordinal]");
            c.subset_map.emplace_back(p[0], p[1]);
        }

        c.annotations = j["paths"]["annotations"].get<std::string>();
        c.init_result = j["paths"]["init_result"].get<std::string>();
        c.ground_truth = j["paths"]["ground_truth"].get<std::string>();
        c.landmark_truth = j["paths"]["landmark_truth"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("configuration: ") + e.what());
    }
    c.validate();
    return c;
}

ordered_json override_patch(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    ordered_json value = ordered_json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string p; std::getline(ss, p, '.');) {
        if (p.empty()) throw ValidationError("override key '" + key + "' has an empty component");
        parts.push_back(p);
    }
    ordered_json patch = std::move(value);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        ordered_json wrap = ordered_json::object();
        wrap[*it] = std::move(patch);
        patch = std::move(wrap);
    }
    return patch;
}

RunConfig build(const ordered_json* file, const std::vector<std::string>& overrides)
{
    ordered_json j = to_json(RunConfig{});
    if (file) overlay(j, *file, "");
    for (const auto& o : overrides) overlay(j, override_patch(o), "");
    return from_json(j);
}

} // namespace

CameraIntrinsics RunConfig::camera_for(int width, int height) const
{
    CameraIntrinsics cam = CameraIntrinsics::for_image(width, height);
    if (focal_px) cam.focal_px = *focal_px;
    if (cx) cam.cx = *cx;
    if (cy) cam.cy = *cy;
    cam.validate();
    return cam;
}

WireframeModel RunConfig::load_model() const
{
    if (wireframe.empty()) {
        std::istringstream in{std::string(bundled_wireframe_text())};
        return facetrack::load_model(in, landmark_indices, anim_selection);
    }
    return load_model_file(wireframe, landmark_indices, anim_selection);
}

void RunConfig::validate() const
{
    if (focal_px && !(*focal_px > 0.0)) throw ValidationError("camera.focal_px must be positive");
    if (landmark_indices.size() != static_cast<std::size_t>(kNumLandmarks)) {
        throw ValidationError("model.landmark_indices must have 26 entries");
    }
    if (anim_selection.size() != static_cast<std::size_t>(kNumAnimParams)) {
        throw ValidationError("model.anim_selection must have 6 entries");
    }
    if (init.refine_rounds < 0) throw ValidationError("init.refine_rounds must be non-negative");
    if (!(init.shape_regularization >= 0.0)) throw ValidationError("init.shape_regularization must be non-negative");
    if (!(init.posit.tolerance > 0.0) || init.posit.max_iterations < 1) {
        throw ValidationError("init.posit_tolerance and posit_max_iterations must be positive");
    }
    tracker.validate();
    if (!(lost_threshold >= 0.0)) throw ValidationError("eval.lost_threshold must be non-negative");
    if (!subset_map.empty() && subset_map.size() != 12) throw ValidationError("eval.subset_map must have 12 pairs");
}

RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides)
{
    ordered_json file;
    try {
        file = ordered_json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("configuration: ") + e.what(), 0);
    }
    return build(&file, overrides);
}

RunConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open configuration", path);
    return parse_config(in, overrides);
}

RunConfig default_config(const std::vector<std::string>& overrides)
{
    return build(nullptr, overrides);
}

void write_config(std::ostream& out, const RunConfig& cfg)
{
    out << to_json(cfg).dump(2) << '\n';
}

} // namespace facetrack
