#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles/lif_oracle.hpp"
#include "spa/error.hpp"
#include "spa/network.hpp"

using namespace spa;

namespace {

NetworkConfig small_config(std::size_t n_input, std::size_t n, bool spa) {
    NetworkConfig c;
    c.n_input = n_input;
    c.n_excitatory = n;
    c.spa_enabled = spa;
    c.seed = 7;
    return c;
}

std::vector<std::vector<std::uint32_t>> random_inputs(std::size_t n_input, std::size_t steps, double p,
                                                      std::mt19937_64& rng) {
    std::bernoulli_distribution spike(p);
    std::vector<std::vector<std::uint32_t>> out(steps);
    for (auto& s : out) {
        for (std::uint32_t i = 0; i < n_input; ++i) {
            if (spike(rng)) s.push_back(i);
        }
    }
    return out;
}

std::vector<std::uint8_t> blob_image(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> px(0, 255);
    std::vector<std::uint8_t> img(784, 0);
    for (int r = 8; r < 20; ++r) {
        for (int c = 10; c < 18; ++c) img[r * 28 + c] = static_cast<std::uint8_t>(px(rng));
    }
    return img;
}

}  // namespace

TEST(Build, StandardShape) {
    Network net(NetworkConfig{});
    EXPECT_EQ(net.n_excitatory(), 100u);
    EXPECT_EQ(net.weights().size(), 784u * 100u);
    for (double w : net.weights()) {
        ASSERT_GE(w, 0.0);
        ASSERT_LT(w, 0.3);
    }
}

TEST(Build, SingleNeuronIsValid) {
    Network net(small_config(4, 1, true));
    std::vector<std::uint32_t> all = {0, 1, 2, 3};
    for (int k = 0; k < 100; ++k) {
        for (const auto& e : net.step(all)) EXPECT_LT(e.target, 2u);
    }
}

TEST(Build, SeedFixesInitialWeights) {
    Network a(NetworkConfig{});
    Network b(NetworkConfig{});
    EXPECT_TRUE(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
    NetworkConfig other;
    other.seed = 1;
    Network c(other);
    EXPECT_FALSE(std::equal(a.weights().begin(), a.weights().end(), c.weights().begin()));
}

TEST(Build, TypeMatrixMismatch) {
    EXPECT_THROW(Network(small_config(4, 3, true), TypeMatrix::standard(2)), Error);
    EXPECT_THROW(TypeMatrix(2, 2, {1, 1, 0}), Error);
    EXPECT_THROW(TypeMatrix(1, 2, {1, 2}), Error);
}

TEST(Encode, BlankImageHasNoSpikes) {
    Rng rng(1);
    std::vector<std::uint8_t> img(784, 0);
    EXPECT_EQ(encode_poisson(img, 350.0, 0.5, 63.75, rng).total(), 0u);
}

TEST(Encode, MeanCountMatchesRate) {
    Rng rng(2);
    std::vector<std::uint8_t> img(1, 255);
    const int trials = 10000;
    std::size_t total = 0;
    for (int k = 0; k < trials; ++k) total += encode_poisson(img, 350.0, 0.5, 63.75, rng).total();
    const double mean = static_cast<double>(total) / trials;
    EXPECT_NEAR(mean, 22.3125, 0.01 * 22.3125);
}

TEST(Encode, StepsAreSortedAndInRange) {
    Rng rng(3);
    const auto img = blob_image(1);
    const auto trains = encode_poisson(img, 350.0, 0.5, 63.75, rng);
    EXPECT_EQ(trains.n_steps(), 700u);
    for (std::size_t k = 0; k < trains.n_steps(); ++k) {
        const auto s = trains.at(k);
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
        for (auto i : s) EXPECT_NE(img[i], 0);
    }
}

TEST(Encode, SeedFixesTrains) {
    Rng a(5);
    Rng b(5);
    const auto img = blob_image(2);
    EXPECT_EQ(encode_poisson(img, 350.0, 0.5, 63.75, a), encode_poisson(img, 350.0, 0.5, 63.75, b));
}

TEST(Step, QuiescentNetworkStaysPut) {
    Network net(small_config(4, 3, true));
    net.set_learning(false);
    for (int k = 0; k < 50; ++k) {
        EXPECT_TRUE(net.step({}).empty());
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(net.membrane_potential(Population::Excitatory, j), -65.0);
    }
}

TEST(Step, MassiveInputFiresOnceThenRefractory) {
    auto c = small_config(1, 1, false);
    c.excitatory.k_v = 5.0;
    Network net(c);
    net.set_learning(false);
    net.weights()[0] = 1.0;
    std::vector<std::uint32_t> in = {0};
    std::vector<std::uint64_t> fires;
    for (int k = 0; k < 30; ++k) {
        net.step(k == 0 ? std::span<const std::uint32_t>(in) : std::span<const std::uint32_t>{});
        if (!net.excitatory_fired().empty()) fires.push_back(net.step_index() - 1);
    }
    ASSERT_EQ(fires.size(), 1u);
    EXPECT_EQ(fires[0], 1u);
}

TEST(Step, SpaOffMatchesLifOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n_input = 30;
        const std::size_t n = 4;
        auto c = small_config(n_input, n, false);
        c.seed = static_cast<std::uint64_t>(trial);
        c.excitatory.k_v = 0.2;
        c.inhibitory.k_v = 1.0;
        Network net(c);
        net.set_learning(false);

        oracle::LifNetworkSpec spec;
        spec.n_input = n_input;
        spec.n = n;
        spec.weights.assign(net.weights().begin(), net.weights().end());
        spec.exc.k_v = 0.2;
        spec.inh = {-60.0, -40.0, -80.0, 10.0, 2.0, 1.0};
        const auto inputs = random_inputs(n_input, 800, 0.05, rng);
        const auto expected = oracle::run_lif_network(spec, inputs);

        std::vector<oracle::Spike> got;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            net.step(inputs[k]);
            for (auto j : net.excitatory_fired()) got.push_back({k, j});
            for (auto j : net.inhibitory_fired()) got.push_back({k, static_cast<std::uint32_t>(n + j)});
        }
        ASSERT_FALSE(expected.empty());
        ASSERT_EQ(got, expected) << "trial " << trial;
    }
}

TEST(Step, ClusterTotalsMatchBruteForce) {
    // Each delivery onto neuron j since its last fire, decayed to the clock.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n_input = 12;
        const std::size_t n = 3;
        auto c = small_config(n_input, n, true);
        c.seed = static_cast<std::uint64_t>(trial);
        c.excitatory.k_v = 0.5;
        Network net(c);
        net.set_learning(false);
        const auto inputs = random_inputs(n_input, 60, 0.15, rng);

        struct Delivery {
            double t;
            double amount;
            bool excitatory;
        };
        std::vector<std::vector<Delivery>> log(n);
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const double t = static_cast<double>(k) * c.dt_ms;
            const auto events = net.step(inputs[k]);
            for (auto j : net.excitatory_fired()) log[j].clear();
            for (std::size_t j = 0; j < n; ++j) {
                const double rec = net.reception(Population::Excitatory, j).value();
                for (auto i : inputs[k]) log[j].push_back({t, rec * net.weight(i, j), true});
            }
            for (const auto& e : events) {
                if (e.target < n) log[e.target].push_back({t, net.reception(Population::Excitatory, e.target).value() * c.w_inh_exc, false});
            }
            const double clock = net.clock_ms();
            for (std::size_t j = 0; j < n; ++j) {
                double exc = 0.0;
                double inh = 0.0;
                for (const auto& d : log[j]) {
                    if (d.excitatory) {
                        exc += d.amount * std::exp(-(clock - d.t) / c.tau1_ms);
                    } else {
                        inh += d.amount * std::exp(-(clock - d.t) / c.tau2_ms);
                    }
                }
                const auto totals = net.cluster_totals(Population::Excitatory, j);
                ASSERT_NEAR(totals.excitatory, exc, 1e-9 * (1.0 + exc)) << "trial " << trial << " step " << k;
                ASSERT_NEAR(totals.inhibitory, inh, 1e-9 * (1.0 + inh)) << "trial " << trial << " step " << k;
            }
        }
    }
}

TEST(Step, LateralInhibitionLowersOtherNeurons) {
    auto run = [](double w_inh_exc) {
        auto c = small_config(2, 3, false);
        c.excitatory.k_v = 0.5;
        c.w_inh_exc = w_inh_exc;
        Network net(c);
        net.set_learning(false);
        auto w = net.weights();
        std::fill(w.begin(), w.end(), 0.0);
        w[0 * 3 + 0] = 1.0;
        w[1 * 3 + 1] = 0.02;
        w[1 * 3 + 2] = 0.03;
        std::vector<std::vector<double>> trace(3);
        std::vector<std::uint32_t> both = {0, 1};
        std::vector<std::uint32_t> weak = {1};
        // Input 0 drives neuron 0 over threshold; input 1 keeps neurons 1 and 2 subthreshold.
        bool fired = false;
        for (int k = 0; k < 40; ++k) {
            net.step(k < 20 ? std::span<const std::uint32_t>(both) : std::span<const std::uint32_t>(weak));
            for (auto j : net.excitatory_fired()) {
                EXPECT_EQ(j, 0u);
                fired = true;
            }
            for (std::size_t j = 0; j < 3; ++j) trace[j].push_back(net.membrane_potential(Population::Excitatory, j));
        }
        EXPECT_TRUE(fired);
        return trace;
    };
    const auto with = run(17.0);
    const auto without = run(0.0);
    bool strictly_lower = false;
    for (std::size_t j : {1u, 2u}) {
        for (std::size_t k = 0; k < with[j].size(); ++k) {
            ASSERT_LE(with[j][k], without[j][k]);
            strictly_lower |= with[j][k] < without[j][k];
        }
    }
    EXPECT_TRUE(strictly_lower);
}

TEST(Sample, BlankImageIsLowActivity) {
    Network net(NetworkConfig{});
    std::vector<std::uint8_t> img(784, 0);
    const auto r = net.run_sample(img);
    EXPECT_TRUE(r.low_activity);
    EXPECT_EQ(r.total(), 0u);
    EXPECT_EQ(r.attempts, net.config().max_retries + 1);
}

TEST(Sample, ImageSizeMismatch) {
    Network net(NetworkConfig{});
    std::vector<std::uint8_t> img(10, 0);
    EXPECT_THROW(net.run_sample(img), Error);
}

TEST(Sample, RunsAreDeterministic) {
    auto c = NetworkConfig{};
    c.excitatory.k_v = 0.05;
    c.inhibitory.k_v = 0.3;
    const auto img = blob_image(4);
    auto raster = [&](Network& net) {
        std::vector<std::pair<std::size_t, std::uint32_t>> out;
        net.set_step_observer([&](const Network& nw, std::size_t k) {
            for (auto j : nw.excitatory_fired()) out.emplace_back(k, j);
        });
        net.run_sample(img);
        return out;
    };
    Network a(c);
    Network b(c);
    EXPECT_EQ(raster(a), raster(b));
    EXPECT_TRUE(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
}

TEST(Sample, ResumeFromExportedStateMatchesUninterrupted) {
    auto c = NetworkConfig{};
    c.n_excitatory = 10;
    c.excitatory.k_v = 0.05;
    c.inhibitory.k_v = 0.3;
    std::vector<std::vector<std::uint8_t>> images;
    for (std::uint64_t s = 0; s < 6; ++s) images.push_back(blob_image(10 + s));

    Network full(c);
    for (const auto& img : images) {
        full.normalize_input_weights();
        full.run_sample(img);
    }

    Network first(c);
    for (std::size_t s = 0; s < 3; ++s) {
        first.normalize_input_weights();
        first.run_sample(images[s]);
    }
    Network resumed(c);
    resumed.import_state(first.export_state());
    for (std::size_t s = 3; s < images.size(); ++s) {
        resumed.normalize_input_weights();
        resumed.run_sample(images[s]);
    }
    EXPECT_EQ(full.export_state(), resumed.export_state());
}

TEST(Sample, ImportRejectsWrongShape) {
    Network a(small_config(4, 2, true));
    Network b(small_config(4, 3, true));
    EXPECT_THROW(b.import_state(a.export_state()), Error);
}

TEST(Sample, EvaluationLeavesStateUntouched) {
    auto c = NetworkConfig{};
    c.n_excitatory = 10;
    c.excitatory.k_v = 0.05;
    Network net(c);
    net.set_learning(false);
    const auto before = net.export_state();
    net.run_sample(blob_image(3));
    const auto after = net.export_state();
    EXPECT_EQ(before.weights, after.weights);
    EXPECT_EQ(before.theta, after.theta);
}
