#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "spa/network.hpp"
#include "spa/stochastic.hpp"

using namespace spa;

namespace {

std::vector<std::uint8_t> digit_like_image() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> px(64, 255);
    std::vector<std::uint8_t> img(784, 0);
    for (int r = 6; r < 22; ++r) {
        for (int c = 9; c < 19; ++c) {
            if ((r + c) % 3 != 0) img[r * 28 + c] = static_cast<std::uint8_t>(px(rng));
        }
    }
    return img;
}

void BM_Step(benchmark::State& state) {
    NetworkConfig c;
    c.spa_enabled = state.range(0) != 0;
    Network net(c);
    Rng rng(2);
    const auto trains = encode_poisson(digit_like_image(), c.sample_ms, c.dt_ms, c.max_rate_hz, rng);
    std::size_t k = 0;
    net.normalize_input_weights();
    net.begin_sample();
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.step(trains.at(k)));
        if (++k == trains.n_steps()) {
            state.PauseTiming();
            net.end_sample();
            net.normalize_input_weights();
            net.begin_sample();
            k = 0;
            state.ResumeTiming();
        }
    }
    state.SetLabel(c.spa_enabled ? "spa on" : "spa off");
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1);

void BM_Sample(benchmark::State& state) {
    NetworkConfig c;
    c.spa_enabled = state.range(0) != 0;
    Network net(c);
    const auto img = digit_like_image();
    for (auto _ : state) {
        net.normalize_input_weights();
        benchmark::DoNotOptimize(net.run_sample(img));
    }
    state.SetLabel(c.spa_enabled ? "spa on" : "spa off");
}
BENCHMARK(BM_Sample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReceptionSample(benchmark::State& state) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(rp.sample(rng));
}
BENCHMARK(BM_ReceptionSample);

void BM_EncodePoisson(benchmark::State& state) {
    const auto img = digit_like_image();
    Rng rng(4);
    for (auto _ : state) benchmark::DoNotOptimize(encode_poisson(img, 350.0, 0.5, 63.75, rng));
}
BENCHMARK(BM_EncodePoisson)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
