#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace spa {

using Rng = std::mt19937_64;

/// Gap kept below 1 when clamping reception rates, so 1/δ stays finite.
inline constexpr double kReceptionCeilingGap = 1e-6;
/// Bounds applied to the per-phase deviation after adaptation.
inline constexpr double kSigmaMin = 1e-3;
inline constexpr double kSigmaMax = 1.0;

/// Gaussian transmitter reception rate of one cluster.
///
/// A fresh rate δ ~ N(μ, σ_i²) is drawn at the start of every firing phase and
/// clamped into [δ₀, 1 − kReceptionCeilingGap]. The deviation σ_i follows the
/// ratio of consecutive phase durations (σ_i / σ_{i−1} = Δt_i / Δt_{i−1}).
class ReceptionProcess {
public:
    ReceptionProcess() : ReceptionProcess(0.75, 0.25, 0.1) {}
    ReceptionProcess(double mean, double initial_sigma, double floor);

    /// Draws and stores a new rate for the current phase.
    double sample(Rng& rng);

    /// Closes a phase at `t_next_phase` and rescales σ by the duration ratio
    /// of the last two phases. Needs two recorded boundaries.
    double adapt_variance(double t_next_phase);

    /// Records a phase boundary without touching σ. A boundary equal to the
    /// last one is kept and makes the next adaptation fail as degenerate.
    void mark_boundary(double t);

    void reset_variance() noexcept { sigma_ = initial_sigma_; }

    /// Forgets recorded boundaries and starts a new history at `t`. σ is kept.
    void restart(double t) noexcept;

    /// Restores state captured by a checkpoint. Boundary history is cleared.
    void restore(double sigma, double value);

    double mean() const noexcept { return mean_; }
    double sigma() const noexcept { return sigma_; }
    double initial_sigma() const noexcept { return initial_sigma_; }
    double floor() const noexcept { return floor_; }
    double ceiling() const noexcept { return 1.0 - kReceptionCeilingGap; }
    double value() const noexcept { return value_; }
    /// Raw Gaussian draw behind the last `sample()`, before clamping.
    double last_unclamped() const noexcept { return last_unclamped_; }
    std::uint64_t phase_index() const noexcept { return phase_index_; }
    std::size_t boundary_count() const noexcept { return boundary_count_; }
    /// Most recent boundary, or the one before it; only the last two are kept.
    double last_boundary() const noexcept { return boundaries_[1]; }
    double previous_boundary() const noexcept { return boundaries_[0]; }

private:
    void push_boundary(double t);

    double mean_;
    double sigma_;
    double initial_sigma_;
    double floor_;
    double value_;
    double last_unclamped_;
    std::uint64_t phase_index_ = 0;
    std::size_t boundary_count_ = 0;
    double boundaries_[2] = {0.0, 0.0};
};

/// Single Gaussian draw; returns `mean` exactly when `sigma == 0`.
double gaussian_draw(double mean, double sigma, Rng& rng);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// E[δ(t) | δ(t₁) = a, δ(t₂) = b] for a Brownian bridge, t₁ < t < t₂.
double bridge_expectation(double a, double b, double t1, double t2, double t);

/// P(T_h ≤ t) for the first time a standard Brownian path reaches `level`.
double hitting_probability(double level, double t);

struct OuModel {
    double reversion_rate = 1.0;  // λ, 1/ms
    double mean = 0.0;            // long-run mean m
    double diffusion = 1.0;       // C

    double stationary_variance() const noexcept;
};

/// Exact-discretization OU path. Element 0 is `x0`; `n_steps` further values follow.
std::vector<double> simulate_ou(const OuModel& model, double x0, double dt, std::size_t n_steps, Rng& rng);

}  // namespace spa
