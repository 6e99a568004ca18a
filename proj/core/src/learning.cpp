#include "spa/learning.hpp"

#include "spa/error.hpp"

namespace spa {

SpikeTraces::SpikeTraces(std::size_t n, double tau_ms, double dt_ms)
    : values_(n, 0.0), decay_(std::exp(-dt_ms / tau_ms)) {
    if (!(tau_ms > 0.0) || !(dt_ms > 0.0)) {
        throw Error(ErrorKind::Domain, "trace decay needs positive tau and dt");
    }
}

void SpikeTraces::advance() noexcept {
    for (double& v : values_) {
        v *= decay_;
    }
}

void update_traces(TraceState& traces, std::span<const std::size_t> pre_events,
                   std::span<const std::size_t> post_events) {
    traces.pre.advance();
    traces.post.advance();
    for (std::size_t i : pre_events) {
        traces.pre.on_spike(i);
    }
    for (std::size_t j : post_events) {
        traces.post.on_spike(j);
    }
}

AdaptiveThreshold::AdaptiveThreshold(std::size_t n, double theta_plus_mv, double tau_theta_ms)
    : theta_(n, 0.0), theta_plus_(theta_plus_mv), tau_theta_(tau_theta_ms) {
    if (theta_plus_mv < 0.0 || !(tau_theta_ms > 0.0)) {
        throw Error(ErrorKind::Domain, "adaptive threshold needs theta_plus >= 0 and tau_theta > 0");
    }
}

double AdaptiveThreshold::adapt(std::size_t neuron, bool fired, double dt_ms) noexcept {
    double& theta = theta_[neuron];
    theta *= std::exp(-dt_ms / tau_theta_);
    if (fired) {
        theta += theta_plus_;
    }
    return theta;
}

void AdaptiveThreshold::decay_all(double factor) noexcept {
    for (double& t : theta_) {
        t *= factor;
    }
}

void normalize_weights(std::span<double> weights, std::size_t rows, std::size_t cols, double target,
                       double w_max) {
    if (!(target > 0.0)) {
        throw Error(ErrorKind::Domain, "normalization target must be positive");
    }
    if (weights.size() != rows * cols) {
        throw Error(ErrorKind::Dimension, "weight matrix size does not match rows x cols");
    }
    std::vector<double> sums(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = weights.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            sums[j] += row[j];
        }
    }
    for (double& s : sums) {
        s = s > 0.0 ? target / s : 1.0;
    }
    for (std::size_t i = 0; i < rows; ++i) {
        double* row = weights.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            row[j] = std::min(row[j] * sums[j], w_max);
        }
    }
}

}  // namespace spa
