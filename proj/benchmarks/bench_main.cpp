#include <random>
#include <vector>

#include <Eigen/Geometry>
#include <benchmark/benchmark.h>

#include "lumigeo/diffusion.hpp"
#include "lumigeo/envmap.hpp"
#include "lumigeo/eval.hpp"
#include "lumigeo/inod.hpp"
#include "lumigeo/kdtree.hpp"
#include "lumigeo/synthetic.hpp"

using namespace lumigeo;

namespace {

synthetic::Scene scene(int size) {
  synthetic::CameraParams cam;
  cam.width = cam.height = size;
  std::mt19937_64 rng(7);
  return synthetic::render(synthetic::random_shape(rng, synthetic::ShapeKind::kCapsuleStack), cam);
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(synthetic::uniform01(rng), synthetic::uniform01(rng), synthetic::uniform01(rng));
  }
  return c;
}

void BM_InodEncode(benchmark::State& state) {
  const auto s = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(inod::encode(s.depth, s.intrinsics));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_InodEncode)->Arg(128)->Arg(512);

void BM_InodRoundTrip(benchmark::State& state) {
  const auto s = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto e = inod::encode(s.depth, s.intrinsics);
    benchmark::DoNotOptimize(inod::unproject_orthographic(e.map));
  }
}
BENCHMARK(BM_InodRoundTrip)->Arg(128)->Arg(512);

void BM_Dilation(benchmark::State& state) {
  const auto s = scene(256);
  const auto map = inod::encode(s.depth, s.intrinsics).map;
  for (auto _ : state) benchmark::DoNotOptimize(inod::dilate_foreground(map, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Dilation)->Arg(2)->Arg(8);

void BM_DilationTrial(benchmark::State& state) {
  const auto s = scene(128);
  const auto map = inod::encode(s.depth, s.intrinsics).map;
  for (auto _ : state) benchmark::DoNotOptimize(diffusion::dilation_trial(map, 2, 3));
}
BENCHMARK(BM_DilationTrial);

void BM_KdTreeBuild(benchmark::State& state) {
  const auto c = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(c.points));
}
BENCHMARK(BM_KdTreeBuild)->Arg(1000)->Arg(100000);

void BM_KdTreeNearest(benchmark::State& state) {
  const KdTree tree(random_cloud(static_cast<std::size_t>(state.range(0)), 1).points);
  const auto queries = random_cloud(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tree.nearest(queries.points[i++ & 1023]));
}
BENCHMARK(BM_KdTreeNearest)->Arg(1000)->Arg(100000);

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_cloud(n, 3), b = random_cloud(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(eval::chamfer_fscore(a, b, 0.05));
}
BENCHMARK(BM_Chamfer)->Arg(1000)->Arg(20000);

void BM_Icp(benchmark::State& state) {
  auto gt = random_cloud(static_cast<std::size_t>(state.range(0)), 5);
  for (auto& p : gt.points) p.x() += 0.3 * p.y() * p.y();
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.6, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  PointCloud pred;
  for (const auto& p : gt.points) pred.points.push_back(r * p + Vec3(0.1, -0.2, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(eval::icp_align(pred, gt));
}
BENCHMARK(BM_Icp)->Arg(1000)->Arg(10000);

void BM_EnvDecompose(benchmark::State& state) {
  std::mt19937_64 rng(9);
  ImageF img(512, 256, 3);
  for (float& v : img.storage()) v = static_cast<float>(10.0 * synthetic::uniform01(rng));
  const envmap::HdrEnvMap env(img);
  for (auto _ : state) benchmark::DoNotOptimize(envmap::decompose(env));
}
BENCHMARK(BM_EnvDecompose);

void BM_Sampler(benchmark::State& state) {
  const int h = 32, w = 32;
  const auto schedule = diffusion::NoiseSchedule::karras(35);
  const diffusion::Denoiser identity = [](const latent::ModalityStack& stack, double) {
    std::vector<latent::LatentTensor> out;
    for (auto m : latent::kAllModalities) {
      const auto slice = stack.slice(m);
      latent::LatentTensor t(stack.width(), stack.height(), 16);
      for (int y = 0; y < stack.height(); ++y)
        for (int x = 0; x < stack.width(); ++x)
          for (int c = 0; c < 16; ++c) t(x, y, c) = slice.channels(x, y, c);
      out.push_back(std::move(t));
    }
    return out;
  };
  const std::vector<latent::LatentTensor> zeros(latent::kModalityCount, latent::LatentTensor(w, h, 16));
  for (auto _ : state) {
    auto init = diffusion::initial_latents(zeros, {}, 1, schedule.initial(), h, w);
    benchmark::DoNotOptimize(diffusion::sample(std::move(init), {}, {}, schedule, identity));
  }
}
BENCHMARK(BM_Sampler);

}  // namespace

BENCHMARK_MAIN();
