#include <benchmark/benchmark.h>

#include "bbsig/forest.hpp"
#include "bbsig/geometry.hpp"
#include "bbsig/hota.hpp"
#include "bbsig/hungarian.hpp"
#include "bbsig/rng.hpp"
#include "bbsig/tracker.hpp"

using namespace bbsig;

static void BM_Iou(benchmark::State& state) {
    BoundingBox a{10, 10, 50, 40}, b{30, 20, 50, 40};
    for (auto _ : state) benchmark::DoNotOptimize(iou(a, b));
}
BENCHMARK(BM_Iou);

static void BM_Hungarian(benchmark::State& state) {
    const int n = int(state.range(0));
    Rng rng(7);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& row : w)
        for (auto& v : row) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(max_weight_assignment(w));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(128);

static void BM_TrackerStep(benchmark::State& state) {
    const int n = int(state.range(0));
    Rng rng(11);
    std::vector<FrameDetection> dets;
    for (int i = 0; i < n; ++i) {
        FrameDetection d;
        d.box = {rng.uniform(0, 900), rng.uniform(0, 500), 40, 30};
        d.confidence = 0.9;
        dets.push_back(d);
    }
    int frame = 0;
    Tracker tracker{TrackerConfig{}};
    for (auto _ : state) {
        ++frame;
        for (auto& d : dets) d.frame = frame;
        benchmark::DoNotOptimize(tracker.step(frame, dets));
    }
}
BENCHMARK(BM_TrackerStep)->Arg(5)->Arg(20);

static void BM_Hota(benchmark::State& state) {
    const int frames = int(state.range(0));
    Rng rng(3);
    DetectionMap gt, pred;
    for (int f = 1; f <= frames; ++f) {
        for (int id = 1; id <= 10; ++id) {
            FrameDetection d;
            d.frame = f;
            d.id = id;
            d.box = {100.0 * id + f, 50.0 * id, 40, 30};
            gt[f].push_back(d);
            d.box.x += rng.uniform(-3, 3);
            pred[f].push_back(d);
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_hota(gt, pred));
}
BENCHMARK(BM_Hota)->Arg(50)->Arg(200);

static void BM_TrainForest(benchmark::State& state) {
    Rng rng(5);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 145; ++i) {
        std::vector<double> row(7);
        for (auto& v : row) v = rng.uniform();
        y.push_back(int(row[2] * 313) % 3);
        X.push_back(std::move(row));
    }
    ForestConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(train_forest(X, y, cfg));
}
BENCHMARK(BM_TrainForest);

BENCHMARK_MAIN();
