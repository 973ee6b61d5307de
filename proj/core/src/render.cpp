/*
 * facetrack - Software rasteriser for textured wireframes
 *
 * File: core/src/render.cpp
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

#include "facetrack/render.hpp"

#include "facetrack/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace facetrack {

namespace {

double edge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p)
{
    return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

constexpr double kInsideEps = 1e-9;

struct ScreenTriangle
{
    std::array<Eigen::Vector2d, 3> p;
    std::array<double, 3> z;
    double area = 0.0;

    // Barycentric weights of q; false when q is outside.
    bool weights(const Eigen::Vector2d& q, std::array<double, 3>& w) const
    {
        w[0] = edge(p[1], p[2], q) / area;
        w[1] = edge(p[2], p[0], q) / area;
        w[2] = edge(p[0], p[1], q) / area;
        return w[0] >= -kInsideEps && w[1] >= -kInsideEps && w[2] >= -kInsideEps;
    }

    double depth(const std::array<double, 3>& w) const
    {
        return 1.0 / (w[0] / z[0] + w[1] / z[1] + w[2] / z[2]);
    }
};

bool screen_triangle(const WireframeModel& model, const Projection& proj, int f, ScreenTriangle& tri)
{
    for (int k = 0; k < 3; ++k) {
        const int v = model.triangles(f, k);
        if (!proj.valid[static_cast<std::size_t>(v)]) return false;
        tri.p[static_cast<std::size_t>(k)] = proj.pixels.row(v).transpose();
        tri.z[static_cast<std::size_t>(k)] = proj.depth(v);
    }
    tri.area = edge(tri.p[0], tri.p[1], tri.p[2]);
    return std::abs(tri.area) > 1e-9;
}

} // namespace

std::vector<PoseAngles> pose_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("pose grid needs lo <= hi and step > 0");
    }
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> values;
    for (int k = 0; k < count; ++k) values.push_back(lo + k * step);

    std::vector<PoseAngles> grid;
    grid.reserve(values.size() * values.size() * values.size());
    for (const double pan : values) {
        for (const double tilt : values) {
            for (const double roll : values) {
                grid.push_back({pan, tilt, roll});
            }
        }
    }
    return grid;
}

double TexturedModel::textured_fraction() const
{
    if (textured.empty()) return 0.0;
    const auto n = std::count(textured.begin(), textured.end(), true);
    return static_cast<double>(n) / static_cast<double>(textured.size());
}

std::vector<bool> front_facing_triangles(const WireframeModel& model, const Points3& vertices)
{
    std::vector<bool> front(static_cast<std::size_t>(model.num_triangles()), false);
    for (int f = 0; f < model.num_triangles(); ++f) {
        const Eigen::Vector3d a = vertices.row(model.triangles(f, 0)).transpose();
        const Eigen::Vector3d b = vertices.row(model.triangles(f, 1)).transpose();
        const Eigen::Vector3d c = vertices.row(model.triangles(f, 2)).transpose();
        const Eigen::Vector3d n = (b - a).cross(c - a);
        // The camera sits at the origin.
        front[static_cast<std::size_t>(f)] = n.dot(a) < 0.0;
    }
    return front;
}

TexturedModel extract_texture(const GrayImage& frame, const WireframeModel& model, const InitResult& init,
                              const CameraIntrinsics& cam)
{
    if (frame.empty()) throw ValidationError("extract_texture: empty frame");
    TexturedModel tm;
    tm.model = model;
    tm.sigma = init.sigma0;
    tm.source = frame.clone();

    const Points3 vertices = shape_instance(model, init.sigma0, init.b0);
    const Projection proj = project(vertices, cam);
    const auto front = front_facing_triangles(model, vertices);

    const auto nt = static_cast<std::size_t>(model.num_triangles());
    tm.texture_coords.resize(nt);
    tm.textured.assign(nt, false);
    for (int f = 0; f < model.num_triangles(); ++f) {
        ScreenTriangle tri;
        const auto fi = static_cast<std::size_t>(f);
        if (!front[fi] || !screen_triangle(model, proj, f, tri)) continue;
        tm.texture_coords[fi] = tri.p;
        tm.textured[fi] = true;
    }
    return tm;
}

RenderOutput render(const TexturedModel& tm, const PoseAnimParams& b, const CameraIntrinsics& cam)
{
    RenderOutput out;
    out.image = GrayImage::zeros(cam.height, cam.width);
    out.depth = cv::Mat_<float>(cam.height, cam.width, std::numeric_limits<float>::infinity());
    out.vertices = shape_instance(tm.model, tm.sigma, b);
    out.projection = project(out.vertices, cam);
    out.front_facing = front_facing_triangles(tm.model, out.vertices);

    // Depth buffer in double so ties between coplanar faces resolve identically every run.
    std::vector<double> zbuf(static_cast<std::size_t>(cam.width) * static_cast<std::size_t>(cam.height),
                             std::numeric_limits<double>::infinity());

    for (int f = 0; f < tm.model.num_triangles(); ++f) {
        const auto fi = static_cast<std::size_t>(f);
        ScreenTriangle tri;
        if (!out.front_facing[fi] || !screen_triangle(tm.model, out.projection, f, tri)) continue;

        double xmin = tri.p[0].x(), xmax = xmin, ymin = tri.p[0].y(), ymax = ymin;
        for (const auto& p : tri.p) {
            xmin = std::min(xmin, p.x());
            xmax = std::max(xmax, p.x());
            ymin = std::min(ymin, p.y());
            ymax = std::max(ymax, p.y());
        }
        const int x0 = std::max(0, static_cast<int>(std::ceil(xmin)));
        const int x1 = std::min(cam.width - 1, static_cast<int>(std::floor(xmax)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(ymin)));
        const int y1 = std::min(cam.height - 1, static_cast<int>(std::floor(ymax)));

        const bool textured = tm.textured[fi];
        const auto& src = tm.texture_coords[fi];
        std::array<double, 3> w{};
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (!tri.weights({static_cast<double>(x), static_cast<double>(y)}, w)) continue;
                const double z = tri.depth(w);
                auto& zb = zbuf[static_cast<std::size_t>(y) * static_cast<std::size_t>(cam.width) +
                                static_cast<std::size_t>(x)];
                if (!(z < zb)) continue;
                zb = z;
                out.depth(y, x) = static_cast<float>(z);
                std::uint8_t value = 0;
                if (textured) {
                    const Eigen::Vector2d s = w[0] * src[0] + w[1] * src[1] + w[2] * src[2];
                    const double g = sample_bilinear(tm.source, s.x(), s.y());
                    value = static_cast<std::uint8_t>(std::clamp(std::lround(g), 0L, 255L));
                }
                out.image(y, x) = value;
            }
        }
    }
    return out;
}

std::vector<bool> landmark_visibility(const WireframeModel& model, const Points3& vertices,
                                      const Projection& projection, const CameraIntrinsics& cam, double depth_eps)
{
    const auto front = front_facing_triangles(model, vertices);
    std::vector<ScreenTriangle> tris;
    tris.reserve(static_cast<std::size_t>(model.num_triangles()));
    for (int f = 0; f < model.num_triangles(); ++f) {
        ScreenTriangle tri;
        if (front[static_cast<std::size_t>(f)] && screen_triangle(model, projection, f, tri)) {
            tris.push_back(tri);
        }
    }

    std::vector<bool> visible(model.landmark_indices.size(), false);
    for (std::size_t k = 0; k < model.landmark_indices.size(); ++k) {
        const int v = model.landmark_indices[k];
        if (!projection.valid[static_cast<std::size_t>(v)]) continue;
        const Eigen::Vector2d p = projection.pixels.row(v).transpose();
        if (p.x() < 0.0 || p.y() < 0.0 || p.x() > cam.width - 1.0 || p.y() > cam.height - 1.0) continue;

        bool any_front = false;
        for (int f = 0; f < model.num_triangles() && !any_front; ++f) {
            const auto row = model.triangles.row(f);
            if ((row.array() == v).any() && front[static_cast<std::size_t>(f)]) any_front = true;
        }
        if (!any_front) continue;

        double surface = std::numeric_limits<double>::infinity();
        std::array<double, 3> w{};
        for (const auto& tri : tris) {
            if (tri.weights(p, w)) surface = std::min(surface, tri.depth(w));
        }
        visible[k] = projection.depth(v) <= surface + depth_eps;
    }
    return visible;
}

RenderedView render_view(const TexturedModel& tm, const PoseAngles& pose, const PoseAnimParams& b0,
                         const CameraIntrinsics& cam)
{
    PoseAnimParams b = b0;
    b.rx = deg2rad(pose.tilt);
    b.ry = deg2rad(pose.pan);
    b.rz = deg2rad(pose.roll);
    RenderOutput r = render(tm, b, cam);

    RenderedView view;
    view.image = std::move(r.image);
    view.pose = pose;
    view.landmarks.resize(static_cast<Eigen::Index>(tm.model.landmark_indices.size()), 2);
    for (std::size_t k = 0; k < tm.model.landmark_indices.size(); ++k) {
        view.landmarks.row(static_cast<Eigen::Index>(k)) = r.projection.pixels.row(tm.model.landmark_indices[k]);
    }
    view.visibility =
        landmark_visibility(tm.model, r.vertices, r.projection, cam, kVisibilityDepthEps * b.tz);
    return view;
}

std::vector<RenderedView> generate_database(const TexturedModel& tm, const std::vector<PoseAngles>& grid,
                                            const PoseAnimParams& b0, const CameraIntrinsics& cam)
{
    std::vector<RenderedView> views(grid.size());
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(grid.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < grid.size(); i += workers) {
                    views[i] = render_view(tm, grid[i], b0, cam);
                }
            });
        }
    }
    return views;
}

void write_database(const std::filesystem::path& directory, const std::vector<RenderedView>& views,
                    const std::string& extension)
{
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec || !std::filesystem::is_directory(directory)) throw IoError("cannot create directory", directory);

    const auto csv_path = directory / "views.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write", csv_path);
    csv.precision(10);
    csv << "index,file,pan_deg,tilt_deg,roll_deg";
    for (int k = 0; k < kNumLandmarks; ++k) csv << ",u" << k << ",v" << k << ",vis" << k;
    csv << '\n';

    for (std::size_t i = 0; i < views.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "view_%04zu", i);
        const auto file = std::string(name) + extension;
        save_image(directory / file, views[i].image);
        const auto& v = views[i];
        csv << i << ',' << file << ',' << v.pose.pan << ',' << v.pose.tilt << ',' << v.pose.roll;
        for (Eigen::Index k = 0; k < v.landmarks.rows(); ++k) {
            csv << ',' << v.landmarks(k, 0) << ',' << v.landmarks(k, 1) << ','
                << (v.visibility[static_cast<std::size_t>(k)] ? 1 : 0);
        }
        csv << '\n';
    }
    if (!csv) throw IoError("write failed", csv_path);
}

} // namespace facetrack
