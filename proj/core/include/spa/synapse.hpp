#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "spa/stochastic.hpp"

namespace spa {

enum class SynapseKind : std::uint8_t { Excitatory, Inhibitory };

struct SynapseState {
    double weight = 0.0;
    SynapseKind kind = SynapseKind::Excitatory;
    double tau_ms = 1.0;
    std::optional<double> last_spike_ms;
};

/// g = δ·ω·exp(−t/τ) for a spike that arrived `t_since_spike` ms ago.
inline double transmitter_conductance(double weight, double tau_ms, double reception, double t_since_spike) {
    return reception * weight * std::exp(-t_since_spike / tau_ms);
}

inline double transmitter_conductance(const SynapseState& syn, double reception, double t_since_spike) {
    return transmitter_conductance(syn.weight, syn.tau_ms, reception, t_since_spike);
}

/// Exact integral of the decaying conductance over one step of length `dt`
/// starting at the spike: δ·ω·τ·(1 − e^{−dt/τ}).
inline double step_conductance_integral(double weight, double tau_ms, double reception, double dt) {
    return reception * weight * tau_ms * -std::expm1(-dt / tau_ms);
}

/// Excitatory and inhibitory transmitter sums of a cluster.
struct PhaseTotals {
    double excitatory = 0.0;
    double inhibitory = 0.0;

    friend bool operator==(const PhaseTotals&, const PhaseTotals&) = default;
};

/// Totals of the last two completed firing phases.
class PhaseLedger {
public:
    void push(PhaseTotals totals) noexcept;

    std::size_t completed() const noexcept { return completed_; }
    const PhaseTotals& current() const noexcept { return current_; }
    const PhaseTotals& previous() const noexcept { return previous_; }

    /// (previous − current) per kind. Needs two completed phases.
    PhaseTotals delta() const;

    void clear() noexcept { *this = PhaseLedger{}; }
    /// Rebuilds a ledger from saved state.
    void restore(std::size_t completed, PhaseTotals previous, PhaseTotals current) noexcept {
        completed_ = completed;
        previous_ = previous;
        current_ = current;
    }

private:
    PhaseTotals previous_;
    PhaseTotals current_;
    std::size_t completed_ = 0;
};

struct SynapseHandle {
    std::size_t synapse = 0;
    std::optional<std::uint32_t> virtual_index;

    bool is_virtual() const noexcept { return virtual_index.has_value(); }
};

/// Summary of a phase that has just been closed.
struct PhaseSummary {
    PhaseTotals totals;
    std::size_t distinct_spiking = 0;
    std::uint32_t virtual_count = 0;
};

/// A post-synaptic neuron's incoming synapses plus the reception process
/// shared by all of them.
///
/// A synapse that spikes again within the same firing phase is represented
/// by a virtual copy carrying its own spike time, so every spike in the phase
/// maps to exactly one (real or virtual) synapse. Virtual copies are dropped
/// when the phase closes.
class Cluster {
public:
    explicit Cluster(std::size_t post_neuron, ReceptionProcess reception = {});

    std::size_t add_synapse(double weight, SynapseKind kind, double tau_ms);

    SynapseHandle register_spike(std::size_t synapse, double t);

    /// Σ δ·ω·exp(−(t − t_s)/τ) over spikes of the current phase, by kind.
    PhaseTotals totals(double t) const;

    /// Difference between the last two completed phases.
    PhaseTotals phase_delta_totals() const { return ledger_.delta(); }

    /// Closes the current phase at `t`: records its totals and clears the
    /// per-phase spike bookkeeping.
    PhaseSummary close_phase(double t);

    std::size_t post_neuron() const noexcept { return post_neuron_; }
    std::size_t size() const noexcept { return synapses_.size(); }
    const SynapseState& synapse(std::size_t id) const { return synapses_.at(id); }
    void set_weight(std::size_t id, double weight) { synapses_.at(id).weight = weight; }
    std::uint32_t virtual_count() const noexcept { return static_cast<std::uint32_t>(virtual_spikes_.size()); }
    /// Real plus virtual synapses that carried a spike this phase.
    std::size_t effective_size() const noexcept { return distinct_spiking_ + virtual_spikes_.size(); }
    std::size_t distinct_spiking() const noexcept { return distinct_spiking_; }

    ReceptionProcess& reception() noexcept { return reception_; }
    const ReceptionProcess& reception() const noexcept { return reception_; }
    const PhaseLedger& ledger() const noexcept { return ledger_; }

private:
    struct VirtualSpike {
        std::size_t synapse;
        double t;
    };

    std::size_t post_neuron_;
    std::vector<SynapseState> synapses_;
    std::vector<VirtualSpike> virtual_spikes_;
    std::size_t distinct_spiking_ = 0;
    ReceptionProcess reception_;
    PhaseLedger ledger_;
};

}  // namespace spa
