#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "vrinr/fusion.hpp"
#include "vrinr/metrics.hpp"
#include "vrinr/trainer.hpp"

using namespace vrinr;

namespace {

FrameSequence synthetic_video(int t, int h, int w) {
    FrameSequence seq(t, h, w);
    for (int f = 0; f < t; ++f)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    seq.at(f, r, c, ch) =
                        0.5 + 0.4 * std::sin(0.3 * c + 0.2 * r + 0.5 * f + ch);
    return seq;
}

Model desk_model(std::uint64_t seed) {
    ModelConfig mc;
    mc.table_log2 = 12;
    Model model(mc, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (const auto& slot : model.layout().slots)
        if (slot.name.ends_with(".table"))
            for (std::int64_t i = slot.offset; i < slot.offset + slot.size; ++i)
                model.params()[i] = dist(rng);
    return model;
}

void BM_BicubicResize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const FrameSequence src = synthetic_video(1, n, n);
    for (auto _ : state) {
        FrameSequence out = bicubic_resize(src, 4 * n, 4 * n);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 16ll * n * n);
}
BENCHMARK(BM_BicubicResize)->Arg(16)->Arg(64);

void BM_HashLookup(benchmark::State& state) {
    const Model model = desk_model(1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> stt(6);
    for (double& v : stt) v = dist(rng);
    VertexNeighborhood nb;
    std::vector<double> feats;
    std::vector<std::uint64_t> slots;
    for (auto _ : state) {
        quantize_vertices_into(stt, 64, nb);
        lookup(nb, model.table(1), feats, slots);
        benchmark::DoNotOptimize(feats.data());
    }
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_HashLookup);

void BM_ForwardPixel(benchmark::State& state) {
    const Model model = desk_model(3);
    const FrameSequence frames = synthetic_video(4, 32, 32);
    PixelCache cache;
    const Coord coord{0.13, -0.41, 0.5};
    for (auto _ : state) {
        forward_pixel(model, frames, coord, cache);
        benchmark::DoNotOptimize(cache.rgb.data());
    }
}
BENCHMARK(BM_ForwardPixel);

void BM_BackwardPixel(benchmark::State& state) {
    const Model model = desk_model(4);
    const FrameSequence frames = synthetic_video(4, 32, 32);
    PixelCache cache;
    forward_pixel(model, frames, {0.13, -0.41, 0.5}, cache);
    std::vector<double> grad(model.params().size(), 0.0);
    const std::vector<double> drgb{0.1, -0.2, 0.3};
    for (auto _ : state) {
        backward_pixel(model, cache, drgb, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(BM_BackwardPixel);

void BM_TrainEpoch(benchmark::State& state) {
    const FrameSequence hr = synthetic_video(4, 32, 32);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_coords = 256;
    cfg.lr0 = 1e-3;
    cfg.model.table_log2 = 12;
    for (auto _ : state) {
        Checkpoint ckpt = fit(hr, cfg);
        benchmark::DoNotOptimize(ckpt.model.params().data());
    }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
    const FrameSequence a = synthetic_video(1, 64, 64);
    FrameSequence b = a;
    for (std::size_t i = 0; i < b.data.size(); i += 2) b.data[i] += 0.01;
    for (auto _ : state) {
        const double v = ssim(a, b);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_Ssim);

}  // namespace

BENCHMARK_MAIN();
