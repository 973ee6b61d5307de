/*
 * facetrack - Exception hierarchy
 *
 * File: core/include/facetrack/error.hpp
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

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace facetrack {

/// Base class of every exception thrown by facetrack.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. line() is 1-based; 0 means "end of input".
class ParseError : public Error
{
public:
    ParseError(const std::string& message, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + message), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A precondition on arguments or configuration does not hold.
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// A point set is geometrically degenerate (e.g. coplanar input to POSIT).
class RankError : public Error
{
public:
    using Error::Error;
};

/// A pixel location lies outside the image.
class OutOfBoundsError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    IoError(const std::string& message, std::filesystem::path path)
        : Error(message + ": " + path.string()), path_(std::move(path))
    {
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace facetrack
