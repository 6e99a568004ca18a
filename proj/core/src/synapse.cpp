#include "spa/synapse.hpp"

#include "spa/error.hpp"

namespace spa {

void PhaseLedger::push(PhaseTotals totals) noexcept {
    previous_ = current_;
    current_ = totals;
    ++completed_;
}

PhaseTotals PhaseLedger::delta() const {
    if (completed_ < 2) {
        throw Error(ErrorKind::History, "insufficient history");
    }
    return {previous_.excitatory - current_.excitatory, previous_.inhibitory - current_.inhibitory};
}

Cluster::Cluster(std::size_t post_neuron, ReceptionProcess reception)
    : post_neuron_(post_neuron), reception_(reception) {}

std::size_t Cluster::add_synapse(double weight, SynapseKind kind, double tau_ms) {
    if (weight < 0.0 || !(tau_ms > 0.0)) {
        throw Error(ErrorKind::Domain, "synapse needs a nonnegative weight and positive decay constant");
    }
    synapses_.push_back({weight, kind, tau_ms, std::nullopt});
    return synapses_.size() - 1;
}

SynapseHandle Cluster::register_spike(std::size_t synapse, double t) {
    if (synapse >= synapses_.size()) {
        throw Error(ErrorKind::Domain, "unknown synapse id " + std::to_string(synapse));
    }
    SynapseState& real = synapses_[synapse];
    if (!real.last_spike_ms) {
        real.last_spike_ms = t;
        ++distinct_spiking_;
        return {synapse, std::nullopt};
    }
    virtual_spikes_.push_back({synapse, t});
    return {synapse, static_cast<std::uint32_t>(virtual_spikes_.size() - 1)};
}

PhaseTotals Cluster::totals(double t) const {
    const double reception = reception_.value();
    PhaseTotals sum;
    auto add = [&](const SynapseState& syn, double spike_t) {
        const double g = transmitter_conductance(syn, reception, t - spike_t);
        (syn.kind == SynapseKind::Excitatory ? sum.excitatory : sum.inhibitory) += g;
    };
    for (const auto& syn : synapses_) {
        if (syn.last_spike_ms) {
            add(syn, *syn.last_spike_ms);
        }
    }
    for (const auto& v : virtual_spikes_) {
        add(synapses_[v.synapse], v.t);
    }
    return sum;
}

PhaseSummary Cluster::close_phase(double t) {
    PhaseSummary summary{totals(t), distinct_spiking_, virtual_count()};
    ledger_.push(summary.totals);
    for (auto& syn : synapses_) {
        syn.last_spike_ms.reset();
    }
    virtual_spikes_.clear();
    distinct_spiking_ = 0;
    return summary;
}

}  // namespace spa
