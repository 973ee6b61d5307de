/*
 * facetrack - Grayscale image helpers
 *
 * File: core/src/image.cpp
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

#include "facetrack/image.hpp"

#include "facetrack/error.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace facetrack {

GrayImage to_gray(const cv::Mat& image)
{
    if (image.depth() != CV_8U) {
        throw ValidationError("only 8-bit images are supported");
    }
    const int channels = image.channels();
    if (channels == 1) return GrayImage(image.clone());
    if (channels != 3 && channels != 4) {
        throw ValidationError("unsupported channel count " + std::to_string(channels));
    }
    GrayImage out(image.rows, image.cols);
    for (int y = 0; y < image.rows; ++y) {
        const auto* src = image.ptr<std::uint8_t>(y);
        auto* dst = out.ptr(y);
        for (int x = 0; x < image.cols; ++x) {
            const auto* p = src + x * channels;
            // BT.601 luma on BGR order.
            const double luma = 0.114 * p[0] + 0.587 * p[1] + 0.299 * p[2];
            dst[x] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
        }
    }
    return out;
}

GrayImage load_image(const std::filesystem::path& path)
{
    const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) throw IoError("cannot read image", path);
    if (raw.depth() == CV_16U) {
        cv::Mat eight;
        raw.convertTo(eight, CV_8U, 1.0 / 257.0);
        return to_gray(eight);
    }
    return to_gray(raw);
}

void save_image(const std::filesystem::path& path, const GrayImage& image)
{
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), image);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok) throw IoError("cannot write image", path);
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& directory)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec)) {
        throw IoError("not a directory", directory);
    }
    static constexpr std::array<std::string_view, 7> extensions{".png", ".pgm", ".ppm", ".jpg",
                                                                ".jpeg", ".bmp", ".tif"};
    std::vector<std::filesystem::path> frames;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) {
            frames.push_back(entry.path());
        }
    }
    std::sort(frames.begin(), frames.end());
    return frames;
}

double sample_bilinear(const GrayImage& image, double x, double y)
{
    const int w = image.cols;
    const int h = image.rows;
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * image(y0, x0) + fx * image(y0, x1);
    const double bottom = (1.0 - fx) * image(y1, x0) + fx * image(y1, x1);
    return (1.0 - fy) * top + fy * bottom;
}

} // namespace facetrack
