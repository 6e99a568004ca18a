#include "spa/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spa/error.hpp"

namespace spa {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Format: return "format";
        case ErrorKind::Io: return "io";
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Config: return "config";
        case ErrorKind::History: return "history";
    }
    return "unknown";
}

ReceptionProcess::ReceptionProcess(double mean, double initial_sigma, double floor)
    : mean_(mean), sigma_(initial_sigma), initial_sigma_(initial_sigma), floor_(floor), value_(mean),
      last_unclamped_(mean) {
    if (!(floor > 0.0 && floor < 1.0)) {
        throw Error(ErrorKind::Domain, "reception floor must lie in (0, 1)");
    }
    if (!(initial_sigma >= 0.0)) {
        throw Error(ErrorKind::Domain, "reception sigma must be nonnegative");
    }
    value_ = std::clamp(mean, floor_, ceiling());
}

double ReceptionProcess::sample(Rng& rng) {
    last_unclamped_ = gaussian_draw(mean_, sigma_, rng);
    value_ = std::clamp(last_unclamped_, floor_, ceiling());
    return value_;
}

void ReceptionProcess::push_boundary(double t) {
    if (boundary_count_ > 0 && t < boundaries_[1]) {
        throw Error(ErrorKind::Domain, "phase boundaries must not decrease");
    }
    boundaries_[0] = boundaries_[1];
    boundaries_[1] = t;
    ++boundary_count_;
    ++phase_index_;
}

void ReceptionProcess::mark_boundary(double t) { push_boundary(t); }

void ReceptionProcess::restart(double t) noexcept {
    boundary_count_ = 1;
    boundaries_[0] = t;
    boundaries_[1] = t;
    ++phase_index_;
}

double ReceptionProcess::adapt_variance(double t_next_phase) {
    if (boundary_count_ < 2) {
        throw Error(ErrorKind::History, "variance adaptation needs two recorded phase boundaries");
    }
    const double previous = boundaries_[1] - boundaries_[0];
    if (previous <= 0.0) {
        throw Error(ErrorKind::Domain, "degenerate phase");
    }
    const double current = t_next_phase - boundaries_[1];
    if (!(current > 0.0)) {
        throw Error(ErrorKind::Domain, "phase boundaries must be strictly increasing");
    }
    sigma_ = std::clamp(sigma_ * current / previous, kSigmaMin, kSigmaMax);
    push_boundary(t_next_phase);
    return sigma_;
}

void ReceptionProcess::restore(double sigma, double value) {
    if (!(sigma > 0.0) || value < floor_ || value > ceiling()) {
        throw Error(ErrorKind::Domain, "reception state out of range");
    }
    sigma_ = sigma;
    value_ = value;
    last_unclamped_ = value;
    boundary_count_ = 0;
    boundaries_[0] = boundaries_[1] = 0.0;
}

double gaussian_draw(double mean, double sigma, Rng& rng) {
    if (sigma == 0.0) {
        return mean;
    }
    std::normal_distribution<double> normal(mean, sigma);
    return normal(rng);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bridge_expectation(double a, double b, double t1, double t2, double t) {
    if (!(t1 < t && t < t2)) {
        throw Error(ErrorKind::Domain, "outside bridge interval");
    }
    return a + (b - a) * (t - t1) / (t2 - t1);
}

double hitting_probability(double level, double t) {
    if (!(t > 0.0)) {
        throw Error(ErrorKind::Domain, "nonpositive horizon");
    }
    // 2(1 − Φ(x)) == erfc(x / √2), without the cancellation for large x.
    return std::erfc(std::abs(level) / std::sqrt(2.0 * t));
}

double OuModel::stationary_variance() const noexcept {
    return diffusion * diffusion / (2.0 * reversion_rate);
}

std::vector<double> simulate_ou(const OuModel& model, double x0, double dt, std::size_t n_steps, Rng& rng) {
    if (!(dt > 0.0) || n_steps == 0) {
        throw Error(ErrorKind::Domain, "simulate_ou needs dt > 0 and at least one step");
    }
    if (!(model.reversion_rate > 0.0) || model.diffusion < 0.0) {
        throw Error(ErrorKind::Domain, "OU model needs a positive reversion rate and nonnegative diffusion");
    }
    const double decay = std::exp(-model.reversion_rate * dt);
    const double noise =
        model.diffusion * std::sqrt((1.0 - decay * decay) / (2.0 * model.reversion_rate));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> path;
    path.reserve(n_steps + 1);
    path.push_back(x0);
    double x = x0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double z = normal(rng);
        x = model.mean + (x - model.mean) * decay + noise * z;
        path.push_back(x);
    }
    return path;
}

}  // namespace spa
