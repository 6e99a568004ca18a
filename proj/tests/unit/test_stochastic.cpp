#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "spa/error.hpp"
#include "spa/stochastic.hpp"

using namespace spa;

namespace {

double mean_of(const std::vector<double>& v, std::size_t skip = 0) {
    return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(skip), v.end(), 0.0) /
           static_cast<double>(v.size() - skip);
}

}  // namespace

TEST(Reception, ZeroSigmaReturnsMean) {
    Rng rng(1);
    ReceptionProcess rp(0.75, 0.0, 0.1);
    EXPECT_EQ(rp.sample(rng), 0.75);
}

TEST(Reception, SamplesStayInClampedRange) {
    Rng rng(2);
    for (double sigma : {0.01, 0.25, 1.0, 5.0}) {
        ReceptionProcess rp(0.5, sigma, 0.1);
        for (int i = 0; i < 200000; ++i) {
            const double d = rp.sample(rng);
            ASSERT_GE(d, 0.1);
            ASSERT_LT(d, 1.0);
        }
    }
}

TEST(Reception, UnclampedMeanMatchesMu) {
    Rng rng(3);
    ReceptionProcess rp(0.5, 0.25, 0.1);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        rp.sample(rng);
        sum += rp.last_unclamped();
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Reception, InitialSigmaIsSigma0) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    EXPECT_EQ(rp.sigma(), 0.25);
}

TEST(Reception, AdaptVarianceEqualDurationsKeepsSigma) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    rp.mark_boundary(0.0);
    rp.mark_boundary(3.0);
    EXPECT_DOUBLE_EQ(rp.adapt_variance(6.0), 0.25);
}

TEST(Reception, AdaptVarianceFollowsDurationRatio) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    rp.mark_boundary(0.0);
    rp.mark_boundary(2.0);
    EXPECT_DOUBLE_EQ(rp.adapt_variance(6.0), 0.5);
    EXPECT_EQ(rp.last_boundary(), 6.0);
}

TEST(Reception, AdaptVarianceClampsSigma) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    rp.mark_boundary(0.0);
    rp.mark_boundary(0.5);
    EXPECT_EQ(rp.adapt_variance(100.0), kSigmaMax);
    EXPECT_EQ(rp.adapt_variance(100.001), kSigmaMin);
}

TEST(Reception, AdaptVarianceErrors) {
    ReceptionProcess rp(0.75, 0.25, 0.1);
    EXPECT_THROW(rp.adapt_variance(1.0), Error);
    rp.mark_boundary(1.0);
    rp.mark_boundary(1.0);
    try {
        rp.adapt_variance(6.0);
        FAIL() << "expected degenerate phase";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate phase"), std::string::npos);
    }
    ReceptionProcess rq(0.75, 0.25, 0.1);
    rq.mark_boundary(0.0);
    rq.mark_boundary(2.0);
    EXPECT_THROW(rq.adapt_variance(2.0), Error);
}

TEST(Reception, AdaptVarianceIsScaleFree) {
    const std::vector<double> times = {0.0, 1.5, 2.0, 4.5, 5.0, 9.0, 9.25};
    for (double c : {0.1, 1.0, 7.0}) {
        ReceptionProcess base(0.75, 0.25, 0.1);
        ReceptionProcess scaled(0.75, 0.25, 0.1);
        base.mark_boundary(times[0]);
        base.mark_boundary(times[1]);
        scaled.mark_boundary(c * times[0]);
        scaled.mark_boundary(c * times[1]);
        for (std::size_t k = 2; k < times.size(); ++k) {
            EXPECT_NEAR(base.adapt_variance(times[k]), scaled.adapt_variance(c * times[k]), 1e-12);
        }
    }
}

TEST(Bridge, Midpoint) { EXPECT_DOUBLE_EQ(bridge_expectation(0.2, 0.6, 0.0, 10.0, 5.0), 0.4); }

TEST(Bridge, ConstantBridge) {
    for (double t : {0.1, 3.0, 9.9}) EXPECT_DOUBLE_EQ(bridge_expectation(0.3, 0.3, 0.0, 10.0, t), 0.3);
}

TEST(Bridge, OutsideIntervalThrows) {
    EXPECT_THROW(bridge_expectation(0.0, 1.0, 0.0, 1.0, 0.0), Error);
    EXPECT_THROW(bridge_expectation(0.0, 1.0, 0.0, 1.0, 1.5), Error);
}

TEST(Bridge, MirrorSymmetry) {
    const double a = 0.1;
    const double b = 0.9;
    const double t1 = 2.0;
    const double t2 = 12.0;
    for (double t : {2.5, 7.0, 11.0}) {
        const double forward = bridge_expectation(a, b, t1, t2, t);
        const double mirrored = bridge_expectation(b, a, t1, t2, t1 + t2 - t);
        EXPECT_NEAR(forward, mirrored, 1e-12);
    }
}

TEST(Hitting, ZeroLevelIsCertain) {
    for (double t : {0.01, 1.0, 100.0}) EXPECT_DOUBLE_EQ(hitting_probability(0.0, t), 1.0);
}

TEST(Hitting, UnitRatio) { EXPECT_NEAR(hitting_probability(1.0, 1.0), 0.3173, 1e-4); }

TEST(Hitting, NonpositiveHorizonThrows) {
    EXPECT_THROW(hitting_probability(1.0, 0.0), Error);
    EXPECT_THROW(hitting_probability(1.0, -1.0), Error);
}

TEST(Hitting, Monotone) {
    double prev = 0.0;
    for (double t = 0.1; t < 10.0; t += 0.1) {
        const double p = hitting_probability(1.5, t);
        EXPECT_GE(p, prev);
        prev = p;
    }
    prev = 1.0;
    for (double level = 0.0; level < 5.0; level += 0.1) {
        const double p = hitting_probability(-level, 2.0);
        EXPECT_LE(p, prev);
        prev = p;
    }
}

TEST(NormalCdf, KnownValues) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-12);
    EXPECT_NEAR(normal_cdf(-1.959963984540054), 0.025, 1e-12);
}

TEST(Ou, ZeroDiffusionAtMeanIsConstant) {
    Rng rng(4);
    const auto path = simulate_ou({1.0, 2.0, 0.0}, 2.0, 0.5, 50, rng);
    ASSERT_EQ(path.size(), 51u);
    for (double x : path) EXPECT_EQ(x, 2.0);
}

TEST(Ou, ZeroDiffusionRelaxation) {
    Rng rng(5);
    const auto path = simulate_ou({1.0, 3.0, 0.0}, 4.0, 1.0, 1, rng);
    EXPECT_NEAR(path[1], 3.0 + std::exp(-1.0), 1e-15);
}

TEST(Ou, StationaryVariance) {
    Rng rng(6);
    const OuModel model{1.0, 0.0, 1.0};
    const auto path = simulate_ou(model, 0.0, 0.5, 1000000, rng);
    const double m = mean_of(path, 100);
    double var = 0.0;
    for (std::size_t k = 100; k < path.size(); ++k) var += (path[k] - m) * (path[k] - m);
    var /= static_cast<double>(path.size() - 100);
    EXPECT_NEAR(var, model.stationary_variance(), 0.02);
    EXPECT_DOUBLE_EQ(model.stationary_variance(), 0.5);
}

TEST(Ou, SeedReproducible) {
    Rng a(7);
    Rng b(7);
    EXPECT_EQ(simulate_ou({}, 0.3, 0.1, 1000, a), simulate_ou({}, 0.3, 0.1, 1000, b));
}

TEST(Ou, InvalidArgumentsThrow) {
    Rng rng(8);
    EXPECT_THROW(simulate_ou({}, 0.0, 0.0, 10, rng), Error);
    EXPECT_THROW(simulate_ou({}, 0.0, 0.1, 0, rng), Error);
    EXPECT_THROW(simulate_ou({0.0, 0.0, 1.0}, 0.0, 0.1, 10, rng), Error);
}
