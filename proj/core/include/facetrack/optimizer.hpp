/*
 * facetrack - Nelder-Mead simplex minimiser
 *
 * File: core/include/facetrack/optimizer.hpp
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

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace facetrack {

struct SimplexConfig
{
    Eigen::VectorXd init_spread; ///< per-axis half-width of the random start points
    int max_iters = 400;
    double f_tol = 1e-6;
    double x_tol = 1e-7;
    std::uint64_t rng_seed = 42;

    /// dim + 1.
    int n_vertices() const noexcept { return static_cast<int>(init_spread.size()) + 1; }
    /// Throws ValidationError unless spreads are positive and tolerances non-negative.
    void validate() const;
};

enum class StopReason
{
    FunctionSpread, ///< max f - min f over the simplex fell below f_tol
    SimplexSize,    ///< largest vertex distance from the best vertex fell below x_tol
    IterationLimit,
    Infeasible, ///< f was not finite at any initial vertex
};

const char* to_string(StopReason reason);

struct SimplexResult
{
    Eigen::VectorXd x;
    double f = 0.0;
    StopReason status = StopReason::IterationLimit;
    int iterations = 0;
    int evaluations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// x0 followed by dim points x0 + delta, delta_i uniform in [-spread_i, spread_i].
std::vector<Eigen::VectorXd> initial_simplex(const Eigen::VectorXd& x0, const SimplexConfig& cfg);

/**
 * Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
 * shrink 0.5. Non-finite objective values count as +infinity. The best
 * vertex only ever improves. When evaluate_parallel is set, the initial
 * vertices and shrink steps are evaluated concurrently, so f must then be
 * safe to call from several threads.
 */
SimplexResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const SimplexConfig& cfg,
                          bool evaluate_parallel = false);

} // namespace facetrack
