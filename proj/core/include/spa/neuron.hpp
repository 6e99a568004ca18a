#pragma once

#include <limits>
#include <optional>

#include "spa/synapse.hpp"

namespace spa {

struct NeuronParams {
    double v0_mv = -65.0;       // resting / initial resetting potential
    double v_thr_mv = -52.0;    // base threshold
    double e_eq_mv = -80.0;     // equilibrium potential
    double tau_v_ms = 10.0;     // membrane decay
    double t_ref_ms = 5.0;      // refractory window
    double dv_a_max_mv = 3.0;   // per-event repolarization clamp
    double k_v = 1.0;           // mV per unit (driving force × integrated conductance)
};

/// Adaptive-repolarization spiking neuron.
///
/// Between fires the membrane is v_res plus the sum of past spike effects,
/// each decaying with τ_v. After a fire it sits at v_res for the refractory
/// window; the repolarization step moves v_res by a few millivolts
/// depending on which transmitter kind dominated the phase, and v_res never
/// leaves v₀ ± Δv_a_max.
class Neuron {
public:
    explicit Neuron(const NeuronParams& params = {});

    /// Effect of an integrated conductance on the membrane, in mV.
    /// Magnitude k_v·|E_eq − v|·∫g; excitatory depolarizes, inhibitory
    /// hyperpolarizes.
    double spike_effect(double g_integral, SynapseKind kind, double v_current) const noexcept;

    /// Adds a contribution arriving at `t`. Ignored while refractory. The
    /// resulting potential never drops below E_eq.
    void receive(double v_m, double t);

    /// Fast path for a fixed-step loop: decays the pending sum by `decay`
    /// (= e^{−dt/τ_v}) and adds `v_m`, stamping the result at `t`.
    void integrate_step(double v_m, double t, double decay) noexcept;

    double membrane_potential(double t) const noexcept;

    /// Fires when out of refractory and v ≥ V_thr + θ.
    bool fire_check(double t, double theta = 0.0) noexcept;

    /// Adjusts v_res after a fire from the transmitter totals of the last two
    /// phases. Returns the new v_res.
    double repolarize(const PhaseTotals& previous, const PhaseTotals& current) noexcept;

    /// Drops pending contributions (membrane back to v_res) and leaves
    /// refractory. v_res is kept.
    void reset_membrane() noexcept;

    bool refractory(double t) const noexcept { return t < refractory_until_; }
    double v_res() const noexcept { return v_res_; }
    void set_v_res(double v) noexcept { v_res_ = v; }
    std::optional<double> last_fire() const noexcept { return last_fire_; }
    const NeuronParams& params() const noexcept { return params_; }

private:
    NeuronParams params_;
    double v_res_;
    double pending_ = 0.0;     // Σ v_M·exp(−(t_pending − t_i)/τ_v)
    double pending_t_ = 0.0;
    double refractory_until_ = -std::numeric_limits<double>::infinity();
    std::optional<double> last_fire_;
};

/// Normalized transmitter balance (Σg_e − Σg_i)/(Σg_e + Σg_i); 0 when both vanish.
double polarization_factor(const PhaseTotals& totals) noexcept;

}  // namespace spa
