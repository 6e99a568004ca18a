#include "spa/neuron.hpp"

#include <algorithm>
#include <cmath>

namespace spa {

Neuron::Neuron(const NeuronParams& params) : params_(params), v_res_(params.v0_mv) {}

double Neuron::spike_effect(double g_integral, SynapseKind kind, double v_current) const noexcept {
    const double magnitude = params_.k_v * std::abs(params_.e_eq_mv - v_current) * g_integral;
    return kind == SynapseKind::Excitatory ? magnitude : -magnitude;
}

void Neuron::receive(double v_m, double t) {
    if (refractory(t)) {
        return;
    }
    pending_ = pending_ * std::exp(-(t - pending_t_) / params_.tau_v_ms) + v_m;
    pending_t_ = t;
    pending_ = std::max(pending_, params_.e_eq_mv - v_res_);
}

void Neuron::integrate_step(double v_m, double t, double decay) noexcept {
    if (refractory(t)) {
        return;
    }
    pending_ = std::max(pending_ * decay + v_m, params_.e_eq_mv - v_res_);
    pending_t_ = t;
}

double Neuron::membrane_potential(double t) const noexcept {
    if (refractory(t)) {
        return v_res_;
    }
    if (pending_ == 0.0) {
        return v_res_;
    }
    if (t == pending_t_) {
        return v_res_ + pending_;
    }
    return v_res_ + pending_ * std::exp(-(t - pending_t_) / params_.tau_v_ms);
}

bool Neuron::fire_check(double t, double theta) noexcept {
    if (refractory(t)) {
        return false;
    }
    if (membrane_potential(t) < params_.v_thr_mv + theta) {
        return false;
    }
    last_fire_ = t;
    pending_ = 0.0;
    pending_t_ = t;
    refractory_until_ = t + params_.t_ref_ms;
    return true;
}

double polarization_factor(const PhaseTotals& totals) noexcept {
    const double sum = totals.excitatory + totals.inhibitory;
    if (sum <= 0.0) {
        return 0.0;
    }
    return (totals.excitatory - totals.inhibitory) / sum;
}

double Neuron::repolarize(const PhaseTotals& previous, const PhaseTotals& current) noexcept {
    const double alpha = polarization_factor(current);
    const double d_exc = previous.excitatory - current.excitatory;
    const double d_inh = previous.inhibitory - current.inhibitory;
    const double direction = d_exc >= d_inh ? 1.0 : -1.0;
    const double headroom = params_.v_thr_mv - v_res_;
    const double adjustment =
        std::clamp(alpha * headroom * direction, -params_.dv_a_max_mv, params_.dv_a_max_mv);
    v_res_ = std::clamp(v_res_ + adjustment, params_.v0_mv - params_.dv_a_max_mv, params_.v0_mv + params_.dv_a_max_mv);
    return v_res_;
}

void Neuron::reset_membrane() noexcept {
    pending_ = 0.0;
    refractory_until_ = -std::numeric_limits<double>::infinity();
}

}  // namespace spa
