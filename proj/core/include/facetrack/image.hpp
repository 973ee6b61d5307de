/*
 * facetrack - Grayscale image helpers
 *
 * File: core/include/facetrack/image.hpp
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

#include <opencv2/core.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace facetrack {

/// 8-bit single-channel image. Pixel (x, y) has its centre at coordinate (x, y).
using GrayImage = cv::Mat_<std::uint8_t>;

/// Converts 1-, 3- (BGR) or 4-channel (BGRA) 8-bit images to luma.
GrayImage to_gray(const cv::Mat& image);

/// Loads any format OpenCV can decode (PNG, PGM, JPEG, ...) as grayscale.
GrayImage load_image(const std::filesystem::path& path);

void save_image(const std::filesystem::path& path, const GrayImage& image);

/// Image files (png, pgm, ppm, jpg, jpeg, bmp) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& directory);

/// Bilinear interpolation with border replication.
double sample_bilinear(const GrayImage& image, double x, double y);

} // namespace facetrack
