/*
 * facetrack - Nelder-Mead simplex minimiser
 *
 * File: core/src/optimizer.cpp
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

#include "facetrack/optimizer.hpp"

#include "facetrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace facetrack {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double finite_or_inf(double v)
{
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

void evaluate_all(const Objective& f, const std::vector<Eigen::VectorXd>& xs, std::vector<double>& fs,
                  std::size_t first, bool parallel)
{
    const std::size_t n = xs.size();
    if (!parallel || n - first < 2) {
        for (std::size_t i = first; i < n; ++i) fs[i] = finite_or_inf(f(xs[i]));
        return;
    }
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n - first);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = first + w; i < n; i += workers) fs[i] = finite_or_inf(f(xs[i]));
        });
    }
}

} // namespace

void SimplexConfig::validate() const
{
    if (init_spread.size() == 0) throw ValidationError("simplex needs at least one dimension");
    if (!init_spread.allFinite() || init_spread.minCoeff() <= 0.0) {
        throw ValidationError("simplex spreads must be positive");
    }
    if (max_iters < 0) throw ValidationError("max_iters must be non-negative");
    if (!(f_tol >= 0.0) || !(x_tol >= 0.0)) throw ValidationError("simplex tolerances must be non-negative");
}

const char* to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::FunctionSpread: return "function-spread";
    case StopReason::SimplexSize: return "simplex-size";
    case StopReason::IterationLimit: return "iteration-limit";
    case StopReason::Infeasible: return "infeasible";
    }
    return "unknown";
}

std::vector<Eigen::VectorXd> initial_simplex(const Eigen::VectorXd& x0, const SimplexConfig& cfg)
{
    cfg.validate();
    if (x0.size() != cfg.init_spread.size()) throw ValidationError("x0 and init_spread sizes differ");
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Eigen::VectorXd> vertices;
    vertices.reserve(static_cast<std::size_t>(cfg.n_vertices()));
    vertices.push_back(x0);
    for (int v = 1; v < cfg.n_vertices(); ++v) {
        Eigen::VectorXd x = x0;
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += unit(rng) * cfg.init_spread(i);
        vertices.push_back(std::move(x));
    }
    return vertices;
}

SimplexResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const SimplexConfig& cfg,
                          bool evaluate_parallel)
{
    std::vector<Eigen::VectorXd> xs = initial_simplex(x0, cfg);
    const std::size_t n = xs.size();
    const Eigen::Index dim = x0.size();
    std::vector<double> fs(n);
    evaluate_all(f, xs, fs, 0, evaluate_parallel);

    SimplexResult result;
    result.evaluations = static_cast<int>(n);
    std::vector<std::size_t> order(n);

    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<Eigen::VectorXd> sx(n);
        std::vector<double> sf(n);
        for (std::size_t i = 0; i < n; ++i) {
            sx[i] = std::move(xs[order[i]]);
            sf[i] = fs[order[i]];
        }
        xs = std::move(sx);
        fs = std::move(sf);
    };
    auto finish = [&](StopReason reason) {
        result.x = xs.front();
        result.f = fs.front();
        result.status = reason;
        return result;
    };

    sort_vertices();
    if (!std::isfinite(fs.front())) return finish(StopReason::Infeasible);

    const std::size_t worst = n - 1;
    while (true) {
        if (fs[worst] - fs.front() < cfg.f_tol) return finish(StopReason::FunctionSpread);
        double diameter = 0.0;
        for (std::size_t i = 1; i < n; ++i) diameter = std::max(diameter, (xs[i] - xs.front()).norm());
        if (diameter < cfg.x_tol) return finish(StopReason::SimplexSize);
        if (result.iterations >= cfg.max_iters) return finish(StopReason::IterationLimit);
        ++result.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i < worst; ++i) centroid += xs[i];
        centroid /= static_cast<double>(worst);

        auto eval = [&](const Eigen::VectorXd& x) {
            ++result.evaluations;
            return finite_or_inf(f(x));
        };

        const Eigen::VectorXd xr = centroid + kReflect * (centroid - xs[worst]);
        const double fr = eval(xr);
        if (fr < fs.front()) {
            const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[worst - 1]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + kContract * (xr - centroid))
                                               : Eigen::VectorXd(centroid + kContract * (xs[worst] - centroid));
            const double fc = eval(xc);
            if (fc < (outside ? fr : fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (std::size_t i = 1; i < n; ++i) xs[i] = xs.front() + kShrink * (xs[i] - xs.front());
                evaluate_all(f, xs, fs, 1, evaluate_parallel);
                result.evaluations += static_cast<int>(n - 1);
            }
        }
        sort_vertices();
    }
}

} // namespace facetrack
