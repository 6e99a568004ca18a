#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spa/error.hpp"
#include "spa/forecast.hpp"

using namespace spa;

namespace {

std::vector<double> ou_series(std::size_t n, std::uint64_t seed, double dt = 0.5) {
    Rng rng(seed);
    return simulate_ou({1.0, 0.0, 1.0}, 0.0, dt, n - 1, rng);
}

}  // namespace

TEST(Fit, RecoversSimulatorParameters) {
    const auto x = ou_series(100000, 1, 0.1);
    const auto m = fit_ou(x, 0.1);
    EXPECT_NEAR(m.reversion_rate, 1.0, 0.05);
    EXPECT_NEAR(m.diffusion, 1.0, 0.05);
    EXPECT_NEAR(m.mean, 0.0, 0.05);
}

TEST(Fit, ConstantSeriesIsDegenerate) {
    std::vector<double> x(50, -61.5);
    const auto m = fit_ou(x, 0.5);
    EXPECT_EQ(m.mean, -61.5);
    EXPECT_EQ(m.diffusion, 0.0);
}

TEST(Fit, WhiteNoiseIsNotOuLike) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(5000);
    for (double& v : x) v = n(rng);
    try {
        fit_ou(x, 0.5);
        FAIL() << "white noise accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
        EXPECT_STREQ(e.what(), "series not OU-like");
    }
}

TEST(Fit, ShortSeriesRejected) {
    std::vector<double> x(kMinFitLength - 1, 1.0);
    EXPECT_THROW(fit_ou(x, 0.5), Error);
}

TEST(ForecastValue, HorizonZeroIsLastValue) {
    EXPECT_EQ(forecast_value({1.0, 0.0, 1.0}, 2.0, 0.0), 2.0);
}

TEST(ForecastValue, ClosedForm) {
    EXPECT_NEAR(forecast_value({1.0, 0.0, 1.0}, 2.0, 1.0), 0.7358, 1e-4);
    EXPECT_NEAR(forecast_value({0.5, -60.0, 1.0}, -50.0, 2.0), -60.0 + 10.0 * std::exp(-1.0), 1e-12);
}

TEST(ForecastValue, RevertsToMean) {
    EXPECT_NEAR(forecast_value({1.0, 3.0, 1.0}, 100.0, 1e3), 3.0, 1e-12);
}

TEST(ForecastMse, Limits) {
    const OuModel m{0.8, 0.0, 1.3};
    EXPECT_EQ(forecast_mse(m, 0.0), 0.0);
    EXPECT_NEAR(forecast_mse(m, 1e4), m.stationary_variance(), 1e-12);
    EXPECT_NEAR(m.stationary_variance(), 1.3 * 1.3 / 1.6, 1e-12);
}

TEST(ForecastMse, MonotoneInHorizon) {
    const OuModel m{0.3, 1.0, 2.0};
    double prev = 0.0;
    for (double h = 0.1; h < 30.0; h += 0.1) {
        const double e = forecast_mse(m, h);
        ASSERT_GT(e, prev);
        prev = e;
    }
}

TEST(ForecastMse, MatchesMonteCarlo) {
    const OuModel m{1.0, 0.0, 1.0};
    Rng rng(3);
    const double x0 = 1.5;
    const double h = 1.0;
    const int paths = 100000;
    double sq = 0.0;
    const double predicted = forecast_value(m, x0, h);
    for (int p = 0; p < paths; ++p) {
        const auto path = simulate_ou(m, x0, h, 1, rng);
        sq += (path[1] - predicted) * (path[1] - predicted);
    }
    const double empirical = sq / paths;
    EXPECT_NEAR(empirical, forecast_mse(m, h), 0.02 * forecast_mse(m, h));
}

TEST(Realized, MatchesModelOnOuData) {
    auto win = make_window("ou", ou_series(200000, 4), 0.5);
    for (double h : {0.5, 1.0, 5.0}) {
        const auto r = realized_forecast_error(win, h);
        EXPECT_EQ(r.pairs, win.series.size() - static_cast<std::size_t>(h / 0.5));
        EXPECT_NEAR(r.mse, forecast_mse(win, h), 0.02 * forecast_mse(win, h));
        EXPECT_GT(r.standard_error, 0.0);
    }
}

TEST(Realized, HorizonMustBeWholeIntervals) {
    auto win = make_window("ou", ou_series(1000, 5), 0.5);
    EXPECT_THROW(realized_forecast_error(win, 0.75), Error);
    EXPECT_THROW(realized_forecast_error(win, 0.0), Error);
}

TEST(Bound, BoundaryPasses) {
    EXPECT_TRUE(check_bound("v", 1.0, 0.25, 0.25).pass);
    EXPECT_FALSE(check_bound("v", 1.0, 0.2500001, 0.25).pass);
    EXPECT_TRUE(check_bound("v", 1.0, 0.3, 0.25, 0.06).pass);
}

TEST(Bound, PassesOnOuData) {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        auto win = make_window("ou", ou_series(50000, seed), 0.5);
        for (double h : {1.0, 5.0, 10.0}) EXPECT_TRUE(diagnose(win, h).pass) << "seed " << seed << " h " << h;
    }
}
