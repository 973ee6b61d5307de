/*
 * facetrack - Micro-benchmarks
 *
 * File: benchmarks/bench_main.cpp
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

// Micro benchmarks for the per-candidate hot path of the tracker: landmark
// projection, descriptor extraction, Mahalanobis scoring and the full energy.

#include "facetrack/appearance.hpp"
#include "facetrack/descriptor.hpp"
#include "facetrack/render.hpp"
#include "facetrack/synthetic.hpp"
#include "facetrack/tracker.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace facetrack;

namespace {

struct Scene
{
    WireframeModel model = bundled_model();
    CameraIntrinsics cam = CameraIntrinsics::for_image(320, 240);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(model.num_shape_units());
    PoseAnimParams b;
    GrayImage frame;
    InitResult init;

    Scene()
    {
        b.tz = 6.0;
        frame = SyntheticFace{}.render(model, sigma, b, cam);
        init.b0 = b;
        init.sigma0 = sigma;
    }
};

const Scene& scene()
{
    static const Scene s;
    return s;
}

void BM_LandmarkPositions(benchmark::State& state)
{
    const Scene& s = scene();
    for (auto _ : state) benchmark::DoNotOptimize(landmark_positions(s.model, s.sigma, s.b, s.cam));
}
BENCHMARK(BM_LandmarkPositions);

void BM_PosedLandmarksWithVisibility(benchmark::State& state)
{
    const Scene& s = scene();
    for (auto _ : state) benchmark::DoNotOptimize(posed_landmarks(s.model, s.sigma, s.b, s.cam));
}
BENCHMARK(BM_PosedLandmarksWithVisibility);

void BM_Sift(benchmark::State& state)
{
    const Scene& s = scene();
    const double patch = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sift_at(s.frame, {160.0, 120.0}, patch));
}
BENCHMARK(BM_Sift)->Arg(8)->Arg(16)->Arg(32);

void BM_Mahalanobis(benchmark::State& state)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd m(128, 128);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m * m.transpose());
    LandmarkGaussian g;
    g.eigvecs = eig.eigenvectors();
    g.eigvals = eig.eigenvalues();
    Descriptor y;
    for (auto& v : y) v = n(rng);
    for (auto _ : state) benchmark::DoNotOptimize(mahalanobis(g, y));
}
BENCHMARK(BM_Mahalanobis);

void BM_Energy(benchmark::State& state)
{
    const Scene& s = scene();
    TrackerConfig cfg;
    cfg.grid_lo = -10;
    cfg.grid_hi = 10;
    const AppearanceModel app = learn_appearance(s.frame, s.model, s.init, s.cam, cfg);
    const EvolutionPrior prior = resolve_prior(cfg, s.b, s.cam);
    EnergyContext ctx;
    ctx.frame = &s.frame;
    ctx.model = &s.model;
    ctx.sigma = &s.sigma;
    ctx.appearance = &app;
    ctx.cam = &s.cam;
    ctx.prior_b = s.b;
    ctx.psi = prior.psi;
    ctx.patch_scale = patch_scale_for(posed_landmarks(s.model, s.sigma, s.b, s.cam).pixels, 0.4);
    PoseAnimParams b = s.b;
    b.ry = 0.03;
    for (auto _ : state) benchmark::DoNotOptimize(energy(b, ctx));
}
BENCHMARK(BM_Energy);

void BM_RenderView(benchmark::State& state)
{
    const Scene& s = scene();
    const TexturedModel tm = extract_texture(s.frame, s.model, s.init, s.cam);
    for (auto _ : state) benchmark::DoNotOptimize(render_view(tm, {10.0, -10.0, 0.0}, s.b, s.cam));
}
BENCHMARK(BM_RenderView);

} // namespace
BENCHMARK_MAIN();
