#include <gtest/gtest.h>

#include <random>

#include "spa/evaluation.hpp"

using namespace spa;

TEST(Tally, AccumulatesPerClass) {
    SpikeTally t(2, 3);
    std::vector<std::uint32_t> a = {1, 4};
    std::vector<std::uint32_t> b = {2, 0};
    t.add(a, 0);
    t.add(b, 0);
    t.add(a, 2);
    EXPECT_EQ(t.at(0, 0), 3u);
    EXPECT_EQ(t.at(1, 0), 4u);
    EXPECT_EQ(t.at(1, 2), 4u);
    EXPECT_EQ(t.at(0, 1), 0u);
    t.clear();
    EXPECT_EQ(t.at(0, 0), 0u);
}

TEST(Assign, ArgmaxWithLowestTieAndSilentNeurons) {
    SpikeTally t(3, 3);
    t.add(std::vector<std::uint32_t>{5, 2, 0}, 1);
    t.add(std::vector<std::uint32_t>{1, 2, 0}, 2);
    const auto labels = assign_labels(t);
    EXPECT_EQ(labels, (std::vector<int>{1, 1, kNoLabel}));
}

TEST(Assign, MatchesBruteForce) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint32_t> c(0, 3);
    std::uniform_int_distribution<std::size_t> lab(0, 9);
    for (int trial = 0; trial < 1000; ++trial) {
        SpikeTally t(5, 10);
        std::vector<std::vector<std::uint64_t>> ref(5, std::vector<std::uint64_t>(10, 0));
        for (int s = 0; s < 20; ++s) {
            std::vector<std::uint32_t> counts(5);
            for (auto& x : counts) x = c(rng);
            const auto l = lab(rng);
            t.add(counts, l);
            for (std::size_t j = 0; j < 5; ++j) ref[j][l] += counts[j];
        }
        const auto labels = assign_labels(t);
        for (std::size_t j = 0; j < 5; ++j) {
            int best = kNoLabel;
            std::uint64_t best_v = 0;
            for (int k = 0; k < 10; ++k) {
                if (ref[j][k] > best_v) {
                    best_v = ref[j][k];
                    best = k;
                }
            }
            ASSERT_EQ(labels[j], best);
        }
    }
}

TEST(Classify, MeanResponsePerClass) {
    // Class 0 has neurons {0, 1} (mean 3), class 1 has neuron 2 (mean 4).
    std::vector<int> assignments = {0, 0, 1};
    std::vector<std::uint32_t> counts = {6, 0, 4};
    EXPECT_EQ(classify(counts, assignments, 2).label, 1);
    counts = {6, 3, 4};
    EXPECT_EQ(classify(counts, assignments, 2).label, 0);
}

TEST(Classify, TieGoesToLowestClass) {
    std::vector<int> assignments = {1, 0};
    std::vector<std::uint32_t> counts = {2, 2};
    const auto p = classify(counts, assignments, 2);
    EXPECT_EQ(p.label, 0);
    EXPECT_FALSE(p.fallback);
}

TEST(Classify, SilentFallsBackToLargestClass) {
    std::vector<int> assignments = {2, 1, 2, kNoLabel};
    std::vector<std::uint32_t> counts = {0, 0, 0, 7};
    const auto p = classify(counts, assignments, 3);
    EXPECT_EQ(p.label, 2);
    EXPECT_TRUE(p.fallback);
}

TEST(Confusion, Accuracy) {
    ConfusionMatrix m(3);
    EXPECT_EQ(m.accuracy(), 0.0);
    m.add(0, 0);
    m.add(1, 2);
    m.add(2, 2);
    m.add(2, 2);
    EXPECT_EQ(m.total(), 4u);
    EXPECT_EQ(m.correct(), 3u);
    EXPECT_EQ(m.at(2, 2), 2u);
    EXPECT_DOUBLE_EQ(m.accuracy(), 0.75);
}
