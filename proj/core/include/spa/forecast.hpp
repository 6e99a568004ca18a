#pragma once

#include <span>
#include <string>
#include <vector>

#include "spa/stochastic.hpp"

namespace spa {

inline constexpr std::size_t kMinFitLength = 10;

/// Moment fit: m is the sample mean, λ = −ln ρ₁ / dt with ρ₁ the lag-1
/// autocorrelation, and C from C²/(2λ) equal to the sample variance.
/// A constant series yields C = 0 with λ = 1. Throws "series not OU-like"
/// when ρ₁ is not significantly positive (ρ₁ ≤ 2/√n).
OuModel fit_ou(std::span<const double> series, double dt_ms);

/// Recorded observable with its fitted model; the window is the conditioning history.
struct ForecastWindow {
    std::string observable;
    std::vector<double> series;
    double interval_ms = 1.0;
    OuModel model;

    double last() const { return series.back(); }
};

ForecastWindow make_window(std::string observable, std::vector<double> series, double interval_ms);

/// Conditional mean m + (x_last − m)·e^{−λΔt}.
double forecast_value(const OuModel& model, double x_last, double horizon_ms);
double forecast_value(const ForecastWindow& win, double horizon_ms);

/// Conditional variance C²(1 − e^{−2λΔt})/(2λ).
double forecast_mse(const OuModel& model, double horizon_ms);
double forecast_mse(const ForecastWindow& win, double horizon_ms);

struct RealizedError {
    double mse = 0.0;
    double standard_error = 0.0;  // of the mean squared error
    std::size_t pairs = 0;
};

/// Squared error of forecasts from every x_k to x_{k+h} inside the window,
/// h = horizon / interval (must be a positive whole number of intervals).
RealizedError realized_forecast_error(const ForecastWindow& win, double horizon_ms);

struct BoundReport {
    std::string observable;
    double horizon_ms = 0.0;
    double e = 0.0;
    double e_bar = 0.0;
    bool pass = false;
};

/// Passes when e_realized ≤ ē + tolerance.
BoundReport check_bound(std::string observable, double horizon_ms, double e_realized, double e_bar,
                        double tolerance = 0.0);

/// Realized error against the model MSE with a tolerance of z standard errors.
BoundReport diagnose(const ForecastWindow& win, double horizon_ms, double z = 3.0);

}  // namespace spa
