/*
 * facetrack - Pose-tracking evaluation metrics and reports
 *
 * File: core/src/eval.cpp
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

#include "facetrack/eval.hpp"

#include "facetrack/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace facetrack {

PoseAngles angles_of(const PoseAnimParams& b)
{
    return {rad2deg(b.ry), rad2deg(b.rx), rad2deg(b.rz)};
}

double rotation_error(const PoseAngles& theta, const PoseAngles& theta_hat)
{
    const double dp = theta.pan - theta_hat.pan;
    const double dt = theta.tilt - theta_hat.tilt;
    const double dr = theta.roll - theta_hat.roll;
    return dp * dp + dt * dt + dr * dr;
}

namespace {

/// Mean and sample standard deviation; NaN for empty input, sd 0 for a single value.
std::pair<double, double> mean_sd(const std::vector<double>& v)
{
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double sum = 0.0;
    for (const double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

} // namespace

MetricsReport buft_metrics(const std::vector<PoseAngles>& estimate, const std::vector<PoseAngles>& truth,
                           double lost_threshold)
{
    if (estimate.size() != truth.size()) {
        throw ValidationError("trajectory has " + std::to_string(estimate.size()) + " frames but ground truth has " +
                              std::to_string(truth.size()));
    }
    if (!(lost_threshold >= 0.0)) throw ValidationError("lost threshold must be non-negative");

    MetricsReport r;
    r.lost_threshold = lost_threshold;
    r.total = static_cast<int>(truth.size());
    std::vector<double> pan, tilt, roll;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = rotation_error(truth[i], estimate[i]);
        r.errors.push_back(e);
        if (e <= lost_threshold) {
            pan.push_back(std::abs(truth[i].pan - estimate[i].pan));
            tilt.push_back(std::abs(truth[i].tilt - estimate[i].tilt));
            roll.push_back(std::abs(truth[i].roll - estimate[i].roll));
        }
    }
    r.n_s = static_cast<int>(pan.size());
    r.p_s = r.total == 0 ? 0.0 : 100.0 * r.n_s / r.total;
    std::tie(r.e_pan, r.sd_pan) = mean_sd(pan);
    std::tie(r.e_tilt, r.sd_tilt) = mean_sd(tilt);
    std::tie(r.e_roll, r.sd_roll) = mean_sd(roll);
    r.e_m = (r.e_pan + r.e_tilt + r.e_roll) / 3.0;
    return r;
}

MetricsReport buft_metrics(const Trajectory& trajectory, const PoseGT& gt, double lost_threshold)
{
    std::vector<PoseAngles> est, truth;
    for (const auto& f : trajectory.frames) est.push_back(angles_of(f.b));
    for (const auto& g : gt) truth.push_back(g.angles());
    return buft_metrics(est, truth, lost_threshold);
}

std::vector<std::pair<int, int>> default_subset_map()
{
    // (68-point index, tracker ordinal): eye corners, nose bridge, tip and
    // alae, mouth corners and the outer lip midpoints.
    return {{36, 4}, {39, 5}, {42, 8}, {45, 9}, {27, 12}, {30, 13},
            {31, 14}, {35, 15}, {48, 16}, {54, 17}, {51, 18}, {57, 19}};
}

std::vector<double> rms_error(const std::vector<Points2>& estimate, const LandmarkGT& gt)
{
    if (gt.subset_map.size() != 12) throw ValidationError("landmark subset map must have 12 pairs");
    if (estimate.size() > gt.frames.size()) {
        throw ValidationError("ground truth is missing frame " + std::to_string(gt.frames.size()));
    }
    std::vector<double> out;
    out.reserve(estimate.size());
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        double ss = 0.0;
        for (const auto& [gi, ti] : gt.subset_map) {
            if (gi < 0 || gi >= gt.frames[i].rows() || ti < 0 || ti >= estimate[i].rows()) {
                throw ValidationError("subset map index out of range in frame " + std::to_string(i));
            }
            ss += (gt.frames[i].row(gi) - estimate[i].row(ti)).squaredNorm();
        }
        out.push_back(std::sqrt(ss / static_cast<double>(gt.subset_map.size())));
    }
    return out;
}

std::vector<double> rms_error(const Trajectory& trajectory, const LandmarkGT& gt)
{
    std::vector<Points2> est;
    for (const auto& f : trajectory.frames) est.push_back(f.landmarks);
    return rms_error(est, gt);
}

namespace {

std::vector<std::string> tokens_of(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

double to_number(const std::string& token, std::size_t line)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw ParseError("bad number '" + token + "'", line);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad number '" + token + "'", line);
    }
}

std::string strip_comment(std::string line)
{
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    return line;
}

} // namespace

PoseGT parse_buft_gt(std::istream& in)
{
    PoseGT gt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokens_of(strip_comment(line));
        if (tok.empty()) continue;
        if (tok.size() != 6) {
            throw ParseError("expected 6 columns, found " + std::to_string(tok.size()), line_no);
        }
        PoseRecord r{to_number(tok[0], line_no), to_number(tok[1], line_no), to_number(tok[2], line_no),
                     to_number(tok[3], line_no), to_number(tok[4], line_no), to_number(tok[5], line_no)};
        if (!std::isfinite(r.x_pos) || !std::isfinite(r.y_pos) || !std::isfinite(r.depth) ||
            !std::isfinite(r.roll) || !std::isfinite(r.pan) || !std::isfinite(r.tilt)) {
            throw ParseError("non-finite value", line_no);
        }
        gt.push_back(r);
    }
    return gt;
}

PoseGT parse_buft_gt_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ground truth", path);
    return parse_buft_gt(in);
}

void write_buft_gt(std::ostream& out, const PoseGT& gt)
{
    const auto old = out.precision(17);
    for (const auto& r : gt) {
        out << r.x_pos << ' ' << r.y_pos << ' ' << r.depth << ' ' << r.roll << ' ' << r.pan << ' ' << r.tilt
            << '\n';
    }
    out.precision(old);
}

Points2 parse_pts(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    long n_points = -1;
    bool in_block = false;
    std::vector<Eigen::Vector2d> pts;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokens_of(strip_comment(line));
        if (tok.empty()) continue;
        if (!in_block) {
            if (tok[0] == "version:") continue;
            if (tok[0] == "n_points:") {
                if (tok.size() != 2) throw ParseError("malformed n_points line", line_no);
                const double n = to_number(tok[1], line_no);
                if (n < 0 || n != std::floor(n)) throw ParseError("bad point count", line_no);
                n_points = static_cast<long>(n);
                continue;
            }
            if (tok[0] == "{") {
                if (n_points < 0) throw ParseError("point block before n_points", line_no);
                in_block = true;
                continue;
            }
            throw ParseError("unexpected '" + tok[0] + "'", line_no);
        }
        if (tok[0] == "}") {
            if (static_cast<long>(pts.size()) != n_points) {
                throw ParseError("expected " + std::to_string(n_points) + " points, found " +
                                     std::to_string(pts.size()),
                                 line_no);
            }
            Points2 out(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
            return out;
        }
        if (tok.size() != 2) throw ParseError("expected two coordinates", line_no);
        pts.emplace_back(to_number(tok[0], line_no), to_number(tok[1], line_no));
    }
    throw ParseError("unterminated point block", line_no == 0 ? 1 : line_no);
}

Points2 parse_pts_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    try {
        return parse_pts(in);
    } catch (const ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what(), e.line());
    }
}

void write_pts(std::ostream& out, const Points2& points)
{
    const auto old = out.precision(17);
    out << "version: 1\nn_points: " << points.rows() << "\n{\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i) out << points(i, 0) << ' ' << points(i, 1) << '\n';
    out << "}\n";
    out.precision(old);
}

LandmarkGT parse_pts_sequence(const std::filesystem::path& directory)
{
    if (!std::filesystem::is_directory(directory)) throw IoError("not a directory", directory);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pts") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    LandmarkGT gt;
    gt.subset_map = default_subset_map();
    for (const auto& f : files) gt.frames.push_back(parse_pts_file(f));
    return gt;
}

void write_report_json(std::ostream& out, const MetricsReport& report)
{
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["lost_threshold_deg2"] = report.lost_threshold;
    j["frames"] = report.total;
    j["N_s"] = report.n_s;
    j["P_s"] = report.p_s;
    j["E_pan"] = num(report.e_pan);
    j["E_tilt"] = num(report.e_tilt);
    j["E_roll"] = num(report.e_roll);
    j["E_m"] = num(report.e_m);
    j["sd_pan"] = num(report.sd_pan);
    j["sd_tilt"] = num(report.sd_tilt);
    j["sd_roll"] = num(report.sd_roll);
    j["rotation_error_deg2"] = nlohmann::json::array();
    for (const double e : report.errors) j["rotation_error_deg2"].push_back(num(e));
    if (!report.rms.empty()) {
        j["rms_px"] = nlohmann::json::array();
        for (const double e : report.rms) j["rms_px"].push_back(num(e));
        j["mean_rms_px"] = num(report.mean_rms);
    }
    out << j.dump(2) << '\n';
}

std::string format_report_table(const MetricsReport& report, const std::string& label)
{
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof(buf), "%-12s %8s %8s %8s %8s %8s\n", "tracker", "P_s(%)", "E_pan", "E_tilt", "E_roll",
                  "E_avg");
    s += buf;
    std::snprintf(buf, sizeof(buf), "%-12s %8.1f %8.2f %8.2f %8.2f %8.2f\n", label.c_str(), report.p_s, report.e_pan,
                  report.e_tilt, report.e_roll, report.e_m);
    s += buf;
    std::snprintf(buf, sizeof(buf), "frames: %d, tracked: %d, lost threshold: %g deg^2\n", report.total, report.n_s,
                  report.lost_threshold);
    s += buf;
    if (!report.rms.empty()) {
        std::snprintf(buf, sizeof(buf), "mean landmark RMS: %.2f px\n", report.mean_rms);
        s += buf;
    }
    return s;
}

} // namespace facetrack
