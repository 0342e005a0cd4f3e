#include <benchmark/benchmark.h>

#include "gapbench/env_metrics.hpp"
#include "gapbench/geometry.hpp"
#include "gapbench/map_gen.hpp"
#include "gapbench/path_oracle.hpp"
#include "gapbench/rng.hpp"
#include "gapbench/scene.hpp"
#include "gapbench/sim.hpp"

using namespace gapbench;

namespace {

MapSpec default_spec(double r_poisson) {
    MapSpec spec;
    spec.r_poisson = r_poisson;
    spec.map_seed = 17;
    return spec;
}

const Scene& dense_scene() {
    static const Scene scene(generate_map(default_spec(2.3)));
    return scene;
}

}  // namespace

static void BM_RayCast(benchmark::State& state) {
    const Scene& scene = dense_scene();
    Rng rng(1);
    for (auto _ : state) {
        const double a = rng.uniform(0.0, 2.0 * kPi);
        const Vec3 o(rng.uniform(10, 150), rng.uniform(10, 150), 1.5);
        benchmark::DoNotOptimize(scene.ray_cast(o, Vec3(std::cos(a), std::sin(a), 0.0), 20.0));
    }
}
BENCHMARK(BM_RayCast);

static void BM_RenderDepth(benchmark::State& state) {
    const Scene& scene = dense_scene();
    CameraModel cam;
    cam.width = static_cast<int>(state.range(0));
    cam.height = cam.width * 3 / 4;
    for (auto _ : state) benchmark::DoNotOptimize(render_depth(scene, Vec3(80, 80, 1.5), 0.3, cam));
    state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RenderDepth)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_SweptCollision(benchmark::State& state) {
    const Scene& scene = dense_scene();
    Rng rng(2);
    for (auto _ : state) {
        const Vec3 p(rng.uniform(10, 150), rng.uniform(10, 150), 1.5);
        benchmark::DoNotOptimize(scene.swept_collision(p, p + Vec3(0.03, 0.01, 0.0), 0.6));
    }
}
BENCHMARK(BM_SweptCollision);

static void BM_ShortestPath(benchmark::State& state) {
    const ObstacleMap& map = dense_scene().map();
    const OccupancyGrid grid = rasterize_occupancy(map, 0.2, 0.6, 1.5);
    const TrialSpec trial = generate_trial(map, 5, TrialConstraints{});
    for (auto _ : state)
        benchmark::DoNotOptimize(shortest_free_path(grid, horizontal(trial.start), horizontal(trial.goal)));
}
BENCHMARK(BM_ShortestPath)->Unit(benchmark::kMillisecond);

static void BM_Rasterize(benchmark::State& state) {
    const ObstacleMap& map = dense_scene().map();
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_occupancy(map, 0.2, 0.6, 1.5));
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);

static void BM_Traversability(benchmark::State& state) {
    const Scene& scene = dense_scene();
    const auto cfg = TraversabilityConfig::defaults_for(scene.bounds(), 0.6);
    for (auto _ : state) benchmark::DoNotOptimize(traversability(scene, cfg));
}
BENCHMARK(BM_Traversability)->Unit(benchmark::kMillisecond);

static void BM_PoissonDisc(benchmark::State& state) {
    const double r = static_cast<double>(state.range(0)) / 10.0;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(poisson_disc_sample(Bounds{0, 0, 160, 160}, r, ++seed));
}
BENCHMARK(BM_PoissonDisc)->Arg(23)->Arg(58)->Unit(benchmark::kMillisecond);

static void BM_GenerateMap(benchmark::State& state) {
    MapSpec spec = default_spec(3.5);
    spec.style = MapStyle::OutdoorClusters;
    for (auto _ : state) {
        ++spec.map_seed;
        benchmark::DoNotOptimize(generate_map(spec));
    }
}
BENCHMARK(BM_GenerateMap)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
