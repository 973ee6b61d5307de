/*
 * facetrack - Deformable face wireframe model
 *
 * File: core/src/wireframe.cpp
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

#include "facetrack/wireframe.hpp"

#include "facetrack/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace facetrack {

const std::array<std::string_view, kNumLandmarks> kLandmarkNames{
    "brow_left_outer",   "brow_left_inner",    "brow_right_inner",   "brow_right_outer",
    "eye_left_outer",    "eye_left_inner",     "eye_left_upper",     "eye_left_lower",
    "eye_right_inner",   "eye_right_outer",    "eye_right_upper",    "eye_right_lower",
    "nose_bridge",       "nose_tip",           "nose_left_ala",      "nose_right_ala",
    "mouth_left_corner", "mouth_right_corner", "lip_upper_outer",    "lip_lower_outer",
    "lip_upper_inner",   "lip_lower_inner",    "lip_upper_left",     "lip_upper_right",
    "cheek_left",        "cheek_right"};

namespace {

enum class Section { none, vertices, faces, anim_units, shape_units, done };

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::optional<Section> section_header(std::string_view text)
{
    const auto u = upper(text);
    if (u.find("VERTEX LIST") != std::string::npos) return Section::vertices;
    if (u.find("FACE LIST") != std::string::npos) return Section::faces;
    if (u.find("ANIMATION UNITS LIST") != std::string::npos) return Section::anim_units;
    if (u.find("SHAPE UNITS LIST") != std::string::npos) return Section::shape_units;
    if (u.find("END OF FILE") != std::string::npos) return Section::done;
    return std::nullopt;
}

std::vector<std::string_view> split(std::string_view s)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const auto start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line)
{
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("expected a number, got '" + std::string(token) + "'", line);
    }
    return value;
}

struct UnitBlock
{
    std::string name;
    struct Entry
    {
        int vertex;
        Eigen::Vector3d displacement;
        std::size_t line;
    };
    std::vector<Entry> entries;
};

class WfmParser
{
public:
    explicit WfmParser(std::istream& in) : in_(in) {}

    void run()
    {
        std::string raw;
        while (section_ != Section::done && std::getline(in_, raw)) {
            ++line_;
            const auto text = trim(raw);
            if (text.empty()) continue;
            if (text.front() == '#') {
                const auto comment = trim(text.substr(1));
                if (const auto s = section_header(comment)) {
                    enter(*s);
                } else {
                    last_comment_ = std::string(comment);
                }
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(text.front()))) {
                const auto s = section_header(text);
                if (!s) throw ParseError("unexpected text '" + std::string(text) + "'", line_);
                enter(*s);
                continue;
            }
            consume(split(text));
        }
        if (line_ == 0) throw ParseError("empty wireframe", 1);
        if (section_ != Section::done) finish_section(line_ + 1);
        if (!have_vertices_) throw ParseError("missing vertex list", line_ + 1);
        if (!have_faces_) throw ParseError("missing face list", line_ + 1);
    }

    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<UnitBlock> anim_units;
    std::vector<UnitBlock> shape_units;

private:
    void enter(Section next)
    {
        finish_section(line_);
        section_ = next;
        expected_count_.reset();
        unit_entries_left_.reset();
        if (next == Section::vertices) have_vertices_ = true;
        if (next == Section::faces) have_faces_ = true;
        if (next == Section::shape_units) shape_units_seen_ = true;
        // Nothing after the shape units is part of the geometry.
        if (next != Section::shape_units && shape_units_seen_) section_ = Section::done;
    }

    void finish_section(std::size_t at_line)
    {
        switch (section_) {
        case Section::vertices:
            check_complete(vertices.size(), at_line, "vertex list");
            break;
        case Section::faces:
            check_complete(faces.size(), at_line, "face list");
            break;
        case Section::anim_units:
            check_units_complete(anim_units, at_line, "animation units");
            break;
        case Section::shape_units:
            check_units_complete(shape_units, at_line, "shape units");
            break;
        default:
            break;
        }
    }

    void check_complete(std::size_t have, std::size_t at_line, const char* what) const
    {
        if (!expected_count_) throw ParseError(std::string(what) + " has no element count", at_line);
        if (have != *expected_count_) {
            throw ParseError(std::string(what) + " truncated: expected " + std::to_string(*expected_count_) +
                                 " entries, found " + std::to_string(have),
                             at_line);
        }
    }

    void check_units_complete(const std::vector<UnitBlock>& units, std::size_t at_line, const char* what) const
    {
        check_complete(units.size(), at_line, what);
        if (unit_entries_left_ && *unit_entries_left_ > 0) {
            throw ParseError(std::string(what) + ": last unit truncated", at_line);
        }
    }

    void consume(const std::vector<std::string_view>& tokens)
    {
        switch (section_) {
        case Section::none:
        case Section::done:
            throw ParseError("data outside of a section", line_);
        case Section::vertices:
            if (!read_count(tokens)) {
                expect_tokens(tokens, 3, "vertex");
                if (vertices.size() == *expected_count_) throw ParseError("too many vertices", line_);
                vertices.emplace_back(parse_number<double>(tokens[0], line_), parse_number<double>(tokens[1], line_),
                                      parse_number<double>(tokens[2], line_));
            }
            break;
        case Section::faces:
            if (!read_count(tokens)) {
                expect_tokens(tokens, 3, "face");
                if (faces.size() == *expected_count_) throw ParseError("too many faces", line_);
                faces.push_back({parse_number<int>(tokens[0], line_), parse_number<int>(tokens[1], line_),
                                 parse_number<int>(tokens[2], line_)});
            }
            break;
        case Section::anim_units:
            consume_unit(tokens, anim_units);
            break;
        case Section::shape_units:
            consume_unit(tokens, shape_units);
            break;
        }
    }

    bool read_count(const std::vector<std::string_view>& tokens)
    {
        if (expected_count_) return false;
        expect_tokens(tokens, 1, "element count");
        const auto n = parse_number<long>(tokens[0], line_);
        if (n < 0) throw ParseError("negative element count", line_);
        expected_count_ = static_cast<std::size_t>(n);
        return true;
    }

    void consume_unit(const std::vector<std::string_view>& tokens, std::vector<UnitBlock>& units)
    {
        if (read_count(tokens)) return;
        if (!unit_entries_left_ || *unit_entries_left_ == 0) {
            if (units.size() == *expected_count_) throw ParseError("too many units", line_);
            expect_tokens(tokens, 1, "unit entry count");
            const auto n = parse_number<long>(tokens[0], line_);
            if (n < 0) throw ParseError("negative unit entry count", line_);
            units.push_back({last_comment_, {}});
            unit_entries_left_ = static_cast<std::size_t>(n);
            return;
        }
        expect_tokens(tokens, 4, "unit entry");
        units.back().entries.push_back(
            {parse_number<int>(tokens[0], line_),
             Eigen::Vector3d(parse_number<double>(tokens[1], line_), parse_number<double>(tokens[2], line_),
                             parse_number<double>(tokens[3], line_)),
             line_});
        --*unit_entries_left_;
    }

    void expect_tokens(const std::vector<std::string_view>& tokens, std::size_t n, const char* what) const
    {
        if (tokens.size() != n) {
            throw ParseError(std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                                 std::to_string(tokens.size()),
                             line_);
        }
    }

    std::istream& in_;
    std::size_t line_ = 0;
    Section section_ = Section::none;
    std::optional<std::size_t> expected_count_;
    std::optional<std::size_t> unit_entries_left_;
    std::string last_comment_;
    bool have_vertices_ = false;
    bool have_faces_ = false;
    bool shape_units_seen_ = false;
};

Eigen::MatrixXd assemble_units(const std::vector<UnitBlock>& units, int num_vertices, std::vector<std::string>& names)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * num_vertices, static_cast<Eigen::Index>(units.size()));
    for (std::size_t k = 0; k < units.size(); ++k) {
        names.push_back(units[k].name);
        for (const auto& [vertex, d, line] : units[k].entries) {
            if (vertex < 0 || vertex >= num_vertices) {
                throw ParseError("unit '" + units[k].name + "' references vertex " + std::to_string(vertex) +
                                     " of " + std::to_string(num_vertices),
                                 line);
            }
            // Candide convention (y up, z towards viewer) to model frame.
            m(3 * vertex + 0, static_cast<Eigen::Index>(k)) += d.x();
            m(3 * vertex + 1, static_cast<Eigen::Index>(k)) -= d.y();
            m(3 * vertex + 2, static_cast<Eigen::Index>(k)) -= d.z();
        }
    }
    return m;
}

void check_selection(std::span<const int> indices, int bound, std::size_t expected, const char* what)
{
    if (indices.size() != expected) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(expected) + " indices, got " +
                              std::to_string(indices.size()));
    }
    std::set<int> seen;
    for (const int i : indices) {
        if (i < 0 || i >= bound) {
            throw ValidationError(std::string(what) + ": index " + std::to_string(i) + " out of range [0, " +
                                  std::to_string(bound) + ")");
        }
        if (!seen.insert(i).second) {
            throw ValidationError(std::string(what) + ": duplicate index " + std::to_string(i));
        }
    }
}

} // namespace

WireframeModel load_model(std::istream& source, std::span<const int> landmark_indices,
                          std::span<const int> anim_selection)
{
    WfmParser parser(source);
    parser.run();

    WireframeModel model;
    const auto n = static_cast<int>(parser.vertices.size());
    model.mean_shape.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        const auto& v = parser.vertices[static_cast<std::size_t>(i)];
        model.mean_shape.row(i) << v.x(), -v.y(), -v.z();
    }
    model.triangles.resize(static_cast<Eigen::Index>(parser.faces.size()), 3);
    for (std::size_t f = 0; f < parser.faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) {
            const int idx = parser.faces[f][static_cast<std::size_t>(k)];
            if (idx < 0 || idx >= n) {
                throw ValidationError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                                      " of " + std::to_string(n));
            }
            model.triangles(static_cast<Eigen::Index>(f), k) = idx;
        }
    }
    // Orient every face towards the camera in the neutral pose so back-face
    // culling does not depend on the file's winding order.
    for (Eigen::Index f = 0; f < model.triangles.rows(); ++f) {
        const Eigen::Vector3d a = model.mean_shape.row(model.triangles(f, 0)).transpose();
        const Eigen::Vector3d b = model.mean_shape.row(model.triangles(f, 1)).transpose();
        const Eigen::Vector3d c = model.mean_shape.row(model.triangles(f, 2)).transpose();
        if ((b - a).cross(c - a).z() > 0.0) std::swap(model.triangles(f, 1), model.triangles(f, 2));
    }
    model.anim_units = assemble_units(parser.anim_units, n, model.anim_unit_names);
    model.shape_units = assemble_units(parser.shape_units, n, model.shape_unit_names);

    check_selection(landmark_indices, n, kNumLandmarks, "landmark_indices");
    check_selection(anim_selection, model.num_anim_units(), kNumAnimParams, "anim_selection");
    model.landmark_indices.assign(landmark_indices.begin(), landmark_indices.end());
    model.anim_selection.assign(anim_selection.begin(), anim_selection.end());
    return model;
}

WireframeModel load_model_file(const std::filesystem::path& path, std::span<const int> landmark_indices,
                               std::span<const int> anim_selection)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open wireframe", path);
    return load_model(in, landmark_indices, anim_selection);
}

WireframeModel bundled_model()
{
    std::istringstream in{std::string(bundled_wireframe_text())};
    return load_model(in, kDefaultLandmarkIndices, kDefaultAnimSelection);
}

} // namespace facetrack
