/*
 * facetrack - Pose from orthography and scaling with iterations
 *
 * File: core/src/posit.cpp
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

#include "facetrack/posit.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace facetrack {

namespace {

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m)
{
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

} // namespace

RigidPose posit(const Points3& object_points, const Points2& image_points, const CameraIntrinsics& cam,
                const PositOptions& options)
{
    const auto m = object_points.rows();
    if (m != image_points.rows()) {
        throw ValidationError("posit: object and image point counts differ");
    }
    if (m < 4) {
        throw ValidationError("posit: needs at least 4 points, got " + std::to_string(m));
    }
    if (!object_points.allFinite() || !image_points.allFinite()) {
        throw ValidationError("posit: non-finite input");
    }
    cam.validate();

    // Reference point: the object point closest to the centroid.
    const Eigen::RowVector3d centroid = object_points.colwise().mean();
    Eigen::Index ref = 0;
    (object_points.rowwise() - centroid).rowwise().squaredNorm().minCoeff(&ref);

    const Eigen::MatrixXd a = object_points.rowwise() - object_points.row(ref);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Vector3d sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(2) < 1e-6 * sv(0)) {
        throw RankError("posit: object points are coplanar or degenerate");
    }
    // Pseudo-inverse of the (M x 3) object matrix.
    const Eigen::MatrixXd b =
        svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();

    const Eigen::VectorXd x = (image_points.col(0).array() - cam.cx) / cam.focal_px;
    const Eigen::VectorXd y = (image_points.col(1).array() - cam.cy) / cam.focal_px;
    const double x0 = x(ref);
    const double y0 = y(ref);

    Eigen::VectorXd eps = Eigen::VectorXd::Zero(m);
    RigidPose pose;
    RigidPose previous;
    bool have_previous = false;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const Eigen::VectorXd xp = x.array() * (1.0 + eps.array()) - x0;
        const Eigen::VectorXd yp = y.array() * (1.0 + eps.array()) - y0;
        const Eigen::Vector3d i_vec = b * xp;
        const Eigen::Vector3d j_vec = b * yp;
        const double s1 = i_vec.norm();
        const double s2 = j_vec.norm();
        if (!(s1 > 0.0) || !(s2 > 0.0)) {
            throw RankError("posit: image points are degenerate");
        }
        const double scale = 0.5 * (s1 + s2);
        const Eigen::Vector3d i_hat = i_vec / s1;
        const Eigen::Vector3d j_hat = j_vec / s2;
        const Eigen::Vector3d k_hat = i_hat.cross(j_hat).normalized();
        const double z0 = 1.0 / scale;

        eps = (a * k_hat) / z0;

        Eigen::Matrix3d r;
        r.row(0) = i_hat.transpose();
        r.row(1) = j_hat.transpose();
        r.row(2) = k_hat.transpose();
        pose.rotation = nearest_rotation(r);
        const Eigen::Vector3d t_ref(x0 * z0, y0 * z0, z0);
        pose.translation = t_ref - pose.rotation * object_points.row(ref).transpose();

        if (have_previous) {
            const double dr = (pose.rotation - previous.rotation).cwiseAbs().maxCoeff();
            const double dt = (pose.translation - previous.translation).cwiseAbs().maxCoeff() / z0;
            if (std::max(dr, dt) < options.tolerance) return pose;
        }
        previous = pose;
        have_previous = true;
    }
    throw PositNotConverged(pose, options.max_iterations);
}

void AnnotationSet::validate() const
{
    if (entries.size() < 6) {
        throw ValidationError("need at least 6 annotated landmarks, got " + std::to_string(entries.size()));
    }
    std::set<int> seen;
    for (const auto& e : entries) {
        if (e.ordinal < 0 || e.ordinal >= kNumLandmarks) {
            throw ValidationError("annotation ordinal " + std::to_string(e.ordinal) + " out of range");
        }
        if (!seen.insert(e.ordinal).second) {
            throw ValidationError("duplicate annotation ordinal " + std::to_string(e.ordinal));
        }
        if (!std::isfinite(e.u) || !std::isfinite(e.v)) {
            throw ValidationError("non-finite annotation for ordinal " + std::to_string(e.ordinal));
        }
    }
}

AnnotationSet read_annotations(std::istream& in, std::string frame_id)
{
    AnnotationSet set;
    set.frame_id = std::move(frame_id);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        Annotation a;
        if (!(fields >> a.ordinal)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError("expected 'ordinal u v'", line_no);
        }
        if (!(fields >> a.u >> a.v)) throw ParseError("expected 'ordinal u v'", line_no);
        std::string extra;
        if (fields >> extra) throw ParseError("trailing data '" + extra + "'", line_no);
        set.entries.push_back(a);
    }
    return set;
}

AnnotationSet read_annotations_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file", path);
    return read_annotations(in, path.stem().string());
}

void write_annotations(std::ostream& out, const AnnotationSet& annotations)
{
    out << "# ordinal u v\n";
    std::ostringstream line;
    line.precision(17);
    for (const auto& a : annotations.entries) {
        line.str({});
        line << a.ordinal << ' ' << a.u << ' ' << a.v << '\n';
        out << line.str();
    }
}

namespace {

Points3 annotated_vertices(const WireframeModel& model, const AnnotationSet& annotations,
                           const Eigen::VectorXd& sigma)
{
    Points3 pts(static_cast<Eigen::Index>(annotations.entries.size()), 3);
    const std::array<double, kNumAnimParams> no_anim{};
    for (std::size_t k = 0; k < annotations.entries.size(); ++k) {
        const int vertex = model.landmark_indices[static_cast<std::size_t>(annotations.entries[k].ordinal)];
        pts.row(static_cast<Eigen::Index>(k)) = deformed_vertex(model, sigma, no_anim, vertex).transpose();
    }
    return pts;
}

Points2 annotated_pixels(const AnnotationSet& annotations)
{
    Points2 px(static_cast<Eigen::Index>(annotations.entries.size()), 2);
    for (std::size_t k = 0; k < annotations.entries.size(); ++k) {
        px.row(static_cast<Eigen::Index>(k)) << annotations.entries[k].u, annotations.entries[k].v;
    }
    return px;
}

// Linear least squares for sigma with the pose held fixed: for each point
// (R(g + S_i sigma) + t) must project onto the annotation, i.e.
// (r0 - x r2).p + (t0 - x t2) = 0 and likewise for y.
Eigen::VectorXd fit_shape(const WireframeModel& model, const AnnotationSet& annotations, const RigidPose& pose,
                          const CameraIntrinsics& cam, double regularization)
{
    const int ns = model.num_shape_units();
    const auto n = static_cast<Eigen::Index>(annotations.entries.size());
    Eigen::MatrixXd a(2 * n, ns);
    Eigen::VectorXd rhs(2 * n);
    const Eigen::Matrix3d& r = pose.rotation;
    const Eigen::Vector3d& t = pose.translation;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& e = annotations.entries[static_cast<std::size_t>(k)];
        const int vertex = model.landmark_indices[static_cast<std::size_t>(e.ordinal)];
        const Eigen::Vector3d g = model.mean_shape.row(vertex).transpose();
        const Eigen::MatrixXd s = model.shape_units.middleRows(3 * vertex, 3);
        const double xn = (e.u - cam.cx) / cam.focal_px;
        const double yn = (e.v - cam.cy) / cam.focal_px;
        const Eigen::RowVector3d cx = r.row(0) - xn * r.row(2);
        const Eigen::RowVector3d cy = r.row(1) - yn * r.row(2);
        a.row(2 * k) = cx * s;
        a.row(2 * k + 1) = cy * s;
        rhs(2 * k) = -(cx.dot(g) + t(0) - xn * t(2));
        rhs(2 * k + 1) = -(cy.dot(g) + t(1) - yn * t(2));
    }
    const Eigen::MatrixXd normal =
        a.transpose() * a + regularization * Eigen::MatrixXd::Identity(ns, ns);
    return normal.ldlt().solve(a.transpose() * rhs);
}

} // namespace

InitResult initialize(const WireframeModel& model, const AnnotationSet& annotations, const CameraIntrinsics& cam,
                      const InitOptions& options)
{
    annotations.validate();
    cam.validate();
    if (model.landmark_indices.size() != static_cast<std::size_t>(kNumLandmarks)) {
        throw ValidationError("model has no landmark selection");
    }

    const Points2 pixels = annotated_pixels(annotations);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(model.num_shape_units());
    RigidPose pose = posit(annotated_vertices(model, annotations, sigma), pixels, cam, options.posit);
    if (options.refine_shape && model.num_shape_units() > 0) {
        for (int round = 0; round < options.refine_rounds; ++round) {
            sigma = fit_shape(model, annotations, pose, cam, options.shape_regularization);
            pose = posit(annotated_vertices(model, annotations, sigma), pixels, cam, options.posit);
        }
    }

    InitResult result;
    const Eigen::Vector3d angles = euler_angles(pose.rotation);
    result.b0.rx = angles(0);
    result.b0.ry = angles(1);
    result.b0.rz = angles(2);
    result.b0.tx = pose.translation(0);
    result.b0.ty = pose.translation(1);
    result.b0.tz = pose.translation(2);
    result.b0.scale = 1.0;
    result.sigma0 = sigma;
    result.b0.validate();

    const Projection proj = landmark_positions(model, sigma, result.b0, cam);
    double sum = 0.0;
    for (std::size_t k = 0; k < annotations.entries.size(); ++k) {
        const auto& e = annotations.entries[k];
        const Eigen::Vector2d d = proj.pixels.row(e.ordinal).transpose() - Eigen::Vector2d(e.u, e.v);
        sum += d.squaredNorm();
    }
    result.reproj_rmse = std::sqrt(sum / static_cast<double>(annotations.entries.size()));
    result.rmse_warning = result.reproj_rmse > options.rmse_warning_px;
    return result;
}

void write_init_result(std::ostream& out, const InitResult& init)
{
    nlohmann::ordered_json j;
    const auto& b = init.b0;
    j["pose"] = {{"rx_deg", rad2deg(b.rx)}, {"ry_deg", rad2deg(b.ry)}, {"rz_deg", rad2deg(b.rz)},
                 {"tx", b.tx},              {"ty", b.ty},              {"tz", b.tz},
                 {"scale", b.scale}};
    j["anim"] = b.anim;
    j["sigma"] = std::vector<double>(init.sigma0.data(), init.sigma0.data() + init.sigma0.size());
    j["reproj_rmse_px"] = init.reproj_rmse;
    j["rmse_warning"] = init.rmse_warning;
    out << j.dump(2) << '\n';
}

InitResult read_init_result(std::istream& in)
{
    nlohmann::json j;
    try {
        in >> j;
        InitResult r;
        const auto& p = j.at("pose");
        r.b0.rx = deg2rad(p.at("rx_deg").get<double>());
        r.b0.ry = deg2rad(p.at("ry_deg").get<double>());
        r.b0.rz = deg2rad(p.at("rz_deg").get<double>());
        r.b0.tx = p.at("tx").get<double>();
        r.b0.ty = p.at("ty").get<double>();
        r.b0.tz = p.at("tz").get<double>();
        r.b0.scale = p.value("scale", 1.0);
        if (j.contains("anim")) r.b0.anim = j.at("anim").get<std::array<double, kNumAnimParams>>();
        const auto sigma = j.at("sigma").get<std::vector<double>>();
        r.sigma0 = Eigen::Map<const Eigen::VectorXd>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
        r.reproj_rmse = j.value("reproj_rmse_px", 0.0);
        r.rmse_warning = j.value("rmse_warning", false);
        r.b0.validate();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("init result: ") + e.what(), 0);
    }
}

} // namespace facetrack
