#include "spa/forecast.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "spa/error.hpp"

namespace spa {

OuModel fit_ou(std::span<const double> series, double dt_ms) {
    if (series.size() < kMinFitLength) {
        throw Error(ErrorKind::Domain, "series needs at least " + std::to_string(kMinFitLength) + " points");
    }
    if (!(dt_ms > 0.0)) throw Error(ErrorKind::Domain, "nonpositive recording interval");
    const auto n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double var = 0.0;
    for (double x : series) var += (x - mean) * (x - mean);
    if (var == 0.0) return OuModel{1.0, mean, 0.0};
    double cov = 0.0;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) cov += (series[k] - mean) * (series[k + 1] - mean);
    double rho = cov / var;
    if (!(rho > 2.0 / std::sqrt(n))) throw Error(ErrorKind::Domain, "series not OU-like");
    rho = std::min(rho, std::nextafter(1.0, 0.0));
    const double lambda = -std::log(rho) / dt_ms;
    const double variance = var / n;
    return OuModel{lambda, mean, std::sqrt(2.0 * lambda * variance)};
}

ForecastWindow make_window(std::string observable, std::vector<double> series, double interval_ms) {
    ForecastWindow win{std::move(observable), std::move(series), interval_ms, {}};
    win.model = fit_ou(win.series, interval_ms);
    return win;
}

double forecast_value(const OuModel& model, double x_last, double horizon_ms) {
    return model.mean + (x_last - model.mean) * std::exp(-model.reversion_rate * horizon_ms);
}

double forecast_value(const ForecastWindow& win, double horizon_ms) {
    return forecast_value(win.model, win.last(), horizon_ms);
}

double forecast_mse(const OuModel& model, double horizon_ms) {
    const double lambda = model.reversion_rate;
    return model.diffusion * model.diffusion * -std::expm1(-2.0 * lambda * horizon_ms) / (2.0 * lambda);
}

double forecast_mse(const ForecastWindow& win, double horizon_ms) { return forecast_mse(win.model, horizon_ms); }

RealizedError realized_forecast_error(const ForecastWindow& win, double horizon_ms) {
    const double ratio = horizon_ms / win.interval_ms;
    const auto h = static_cast<std::size_t>(std::llround(ratio));
    if (h == 0 || std::abs(ratio - static_cast<double>(h)) > 1e-9 * std::max(1.0, ratio)) {
        throw Error(ErrorKind::Domain, "horizon must be a positive multiple of the recording interval");
    }
    if (h >= win.series.size()) throw Error(ErrorKind::Domain, "horizon exceeds the recorded window");
    const std::size_t pairs = win.series.size() - h;
    std::vector<double> e2(pairs);
    for (std::size_t k = 0; k < pairs; ++k) {
        const double err = win.series[k + h] - forecast_value(win.model, win.series[k], horizon_ms);
        e2[k] = err * err;
    }
    const double mse = std::accumulate(e2.begin(), e2.end(), 0.0) / static_cast<double>(pairs);

    // Overlapping horizons correlate neighbouring errors, so the standard
    // error comes from means of batches much longer than the horizon.
    std::size_t batch = 10 * h;
    if (pairs / batch < 2) batch = 1;
    const std::size_t n_batches = pairs / batch;
    double ss = 0.0;
    for (std::size_t b = 0; b < n_batches; ++b) {
        const double m = std::accumulate(e2.begin() + static_cast<std::ptrdiff_t>(b * batch),
                                         e2.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch), 0.0) /
                         static_cast<double>(batch);
        ss += (m - mse) * (m - mse);
    }
    const double nb = static_cast<double>(n_batches);
    const double se = n_batches > 1 ? std::sqrt(ss / (nb - 1.0) / nb) : 0.0;
    return RealizedError{mse, se, pairs};
}

BoundReport check_bound(std::string observable, double horizon_ms, double e_realized, double e_bar,
                        double tolerance) {
    return BoundReport{std::move(observable), horizon_ms, e_realized, e_bar, e_realized <= e_bar + tolerance};
}

BoundReport diagnose(const ForecastWindow& win, double horizon_ms, double z) {
    const auto realized = realized_forecast_error(win, horizon_ms);
    return check_bound(win.observable, horizon_ms, realized.mse, forecast_mse(win, horizon_ms),
                       z * realized.standard_error);
}

}  // namespace spa
