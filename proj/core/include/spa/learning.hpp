#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace spa {

enum class StdpMode {
    TraceSoftBound,  // post: A⁺·x_pre·(ω_max − ω); pre: −A⁻·x_post·ω
    PostOnlyExp,     // post: A⁺·exp(−ω); pre events ignored
};

enum class StdpEvent { Pre, Post };

struct StdpParams {
    double a_plus = 0.01;
    double a_minus = 0.0001;
    double tau_trace_ms = 20.0;
    double x_tar = 0.0;
    double w_max = 1.0;
    StdpMode mode = StdpMode::TraceSoftBound;
};

/// Weight change for one STDP event. `trace` is the partner trace: x_pre for
/// a post event, x_post for a pre event. The result keeps ω + Δω in [0, ω_max].
inline double stdp_update(double w, double trace, StdpEvent event, const StdpParams& p) noexcept {
    double dw = 0.0;
    if (p.mode == StdpMode::TraceSoftBound) {
        dw = event == StdpEvent::Post ? p.a_plus * (trace - p.x_tar) * (p.w_max - w) : -p.a_minus * trace * w;
    } else if (event == StdpEvent::Post) {
        dw = p.a_plus * std::exp(-w);
    }
    return std::clamp(w + dw, 0.0, p.w_max) - w;
}

/// Exponentially decaying spike traces, one per unit, on a fixed step.
class SpikeTraces {
public:
    SpikeTraces() = default;
    SpikeTraces(std::size_t n, double tau_ms, double dt_ms);

    /// Decays every trace by one step.
    void advance() noexcept;
    void on_spike(std::size_t i) noexcept { values_[i] += 1.0; }
    void reset() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double decay() const noexcept { return decay_; }

private:
    std::vector<double> values_;
    double decay_ = 1.0;
};

struct TraceState {
    SpikeTraces pre;   // per input synapse
    SpikeTraces post;  // per excitatory neuron
};

/// One step of trace dynamics: decay all traces, then +1 for each event.
void update_traces(TraceState& traces, std::span<const std::size_t> pre_events,
                   std::span<const std::size_t> post_events);

/// Homeostatic threshold offset θ per neuron.
class AdaptiveThreshold {
public:
    AdaptiveThreshold() = default;
    AdaptiveThreshold(std::size_t n, double theta_plus_mv, double tau_theta_ms);

    /// θ ← θ·exp(−dt/τ_θ), then + θ_plus if the neuron fired.
    double adapt(std::size_t neuron, bool fired, double dt_ms) noexcept;

    void decay_all(double factor) noexcept;
    void on_fire(std::size_t neuron) noexcept { theta_[neuron] += theta_plus_; }

    double operator[](std::size_t i) const noexcept { return theta_[i]; }
    std::span<const double> values() const noexcept { return theta_; }
    std::span<double> values() noexcept { return theta_; }
    double theta_plus() const noexcept { return theta_plus_; }
    double tau_theta() const noexcept { return tau_theta_; }

private:
    std::vector<double> theta_;
    double theta_plus_ = 0.05;
    double tau_theta_ = 1e7;
};

/// Rescales each column of a row-major rows×cols matrix so it sums to
/// `target`. All-zero columns are left alone. Entries pushed above `w_max`
/// are clipped, in which case that column ends up short of `target`.
void normalize_weights(std::span<double> weights, std::size_t rows, std::size_t cols, double target,
                       double w_max);

}  // namespace spa

namespace spa {

/// Everything the training loop needs beyond the STDP rule itself.
struct LearningParams {
    StdpParams stdp;
    double theta_plus_mv = 0.05;
    double tau_theta_ms = 1e7;
    double norm_target = 78.0;
};

}  // namespace spa
