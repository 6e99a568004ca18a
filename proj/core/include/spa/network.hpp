#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spa/learning.hpp"
#include "spa/neuron.hpp"
#include "spa/stochastic.hpp"
#include "spa/synapse.hpp"

namespace spa {

/// 0/1 neuron-type grid: 1 marks an excitatory neuron, 0 an inhibitory one.
/// Entries are read in row-major order; the first `n_excitatory` cover the
/// excitatory population, the rest the inhibitory population.
class TypeMatrix {
public:
    TypeMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> entries);

    /// Two rows: all-ones for the excitatory population, all-zeros for the
    /// inhibitory one.
    static TypeMatrix standard(std::size_t n_excitatory);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return entries_.size(); }
    SynapseKind kind(std::size_t neuron) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint8_t> entries_;
};

struct NetworkConfig {
    std::size_t n_input = 784;
    std::size_t n_excitatory = 100;
    double dt_ms = 0.5;
    double sample_ms = 350.0;
    double rest_ms = 150.0;
    double max_rate_hz = 63.75;
    bool spa_enabled = true;
    std::uint64_t seed = 0;

    double tau1_ms = 1.0;  // excitatory transmitter decay
    double tau2_ms = 2.0;  // inhibitory transmitter decay
    NeuronParams excitatory{-65.0, -52.0, -80.0, 10.0, 5.0, 3.0, 0.1};
    NeuronParams inhibitory{-60.0, -40.0, -80.0, 10.0, 2.0, 3.0, 0.3};

    double sigma0 = 0.25;
    double delta0 = 0.1;
    double mu_min = 0.75;  // each cluster's reception mean is drawn from U(mu_min, mu_max)
    double mu_max = 0.75;
    std::size_t k_min = 3;  // fewer distinct spiking synapses than this resets σ

    double w_init_max = 0.3;
    double w_exc_inh = 22.5;
    double w_inh_exc = 17.0;

    std::size_t min_spikes = 5;
    std::size_t max_retries = 5;
    double rate_boost = 0.5;  // retry r runs at (1 + r·boost) × the base rates

    LearningParams learning{.stdp = {}, .theta_plus_mv = 0.5};
};

enum class Population : std::uint8_t { Excitatory, Inhibitory };

struct SpikeEvent {
    std::uint32_t source = 0;  // global neuron id: excitatory j → j, inhibitory j → n + j
    std::uint32_t target = 0;  // global id of the receiving neuron
    double time_ms = 0.0;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Input spikes in step-major compressed form.
class SpikeTrains {
public:
    SpikeTrains() = default;
    SpikeTrains(std::size_t n_sources, std::size_t n_steps, double dt_ms, std::vector<std::uint32_t> offsets,
                std::vector<std::uint32_t> sources);

    /// Sources spiking during step `k`, ascending.
    std::span<const std::uint32_t> at(std::size_t k) const noexcept {
        return {sources_.data() + offsets_[k], sources_.data() + offsets_[k + 1]};
    }
    std::size_t n_sources() const noexcept { return n_sources_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double dt_ms() const noexcept { return dt_ms_; }
    std::size_t total() const noexcept { return sources_.size(); }
    std::vector<std::size_t> counts_per_source() const;

    friend bool operator==(const SpikeTrains&, const SpikeTrains&) = default;

private:
    std::size_t n_sources_ = 0;
    std::size_t n_steps_ = 0;
    double dt_ms_ = 0.0;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<std::uint32_t> sources_;
};

/// Independent Bernoulli(rate·dt) spikes per pixel, rate = pixel/255 · max_rate.
SpikeTrains encode_poisson(std::span<const std::uint8_t> image, double duration_ms, double dt_ms,
                           double max_rate_hz, Rng& rng);

struct SampleResult {
    std::vector<std::uint32_t> counts;  // excitatory spikes during the final presentation
    std::size_t attempts = 0;
    bool low_activity = false;  // retries exhausted below min_spikes

    std::uint64_t total() const noexcept;
};

/// Per-neuron state a checkpoint needs to resume a network.
struct NetworkState {
    std::vector<double> weights;      // n_input × n_excitatory, row-major by input
    std::vector<double> theta;        // n_excitatory
    std::vector<double> v_res;        // excitatory then inhibitory
    std::vector<double> reception_mean;
    std::vector<double> reception_sigma;
    std::vector<double> reception_value;
    std::vector<double> ledger;  // per neuron: completed, previous (exc, inh), current (exc, inh)
    std::uint64_t step_index = 0;
    std::string input_rng;
    std::string spa_rng;

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Two-layer network: Poisson inputs → excitatory population (plastic,
/// all-to-all), excitatory → inhibitory one-to-one, inhibitory → every other
/// excitatory neuron. Each neuron owns a cluster of its incoming synapses and
/// a reception process for it.
///
/// Each step at clock t: decay traces and θ, check fires at t, apply
/// post-event STDP, deliver input spikes at t (pre-event STDP), deliver
/// recurrent spikes from the fires at t, then integrate every membrane over
/// [t, t + dt].
class Network {
public:
    explicit Network(const NetworkConfig& config);
    Network(const NetworkConfig& config, const TypeMatrix& types);

    /// Advances the clock by one step with `input_spikes` arriving at its start.
    std::span<const SpikeEvent> step(std::span<const std::uint32_t> input_spikes);

    /// Starts a presentation: new phase for every cluster.
    void begin_sample();
    /// Ends a presentation: membranes back to v_res, conductances and traces cleared.
    void end_sample();

    /// Runs fixed trains followed by the rest period; returns excitatory counts
    /// from the presentation window.
    std::vector<std::uint32_t> present(const SpikeTrains& trains);

    /// Encodes and presents `image`, re-presenting at boosted rates while the
    /// excitatory total stays under `min_spikes`.
    SampleResult run_sample(std::span<const std::uint8_t> image);

    /// Rescales every excitatory neuron's input column to the target sum.
    void normalize_input_weights();

    /// Called after every presentation step of `present`, with the step's index in the sample.
    using StepObserver = std::function<void(const Network&, std::size_t)>;
    void set_step_observer(StepObserver observer) { observer_ = std::move(observer); }

    void set_learning(bool enabled) noexcept { learning_ = enabled; }
    bool learning() const noexcept { return learning_; }

    const NetworkConfig& config() const noexcept { return config_; }
    std::size_t n_input() const noexcept { return config_.n_input; }
    std::size_t n_excitatory() const noexcept { return config_.n_excitatory; }
    std::uint64_t step_index() const noexcept { return step_; }
    double clock_ms() const noexcept { return time_at(step_); }

    std::span<const double> weights() const noexcept { return weights_; }
    std::span<double> weights() noexcept { return weights_; }
    double weight(std::size_t input, std::size_t neuron) const noexcept {
        return weights_[input * config_.n_excitatory + neuron];
    }
    const AdaptiveThreshold& theta() const noexcept { return theta_; }
    AdaptiveThreshold& theta() noexcept { return theta_; }
    const TraceState& traces() const noexcept { return traces_; }
    /// Excitatory neurons that fired in the most recent step.
    std::span<const std::uint32_t> excitatory_fired() const noexcept { return exc_fired_; }
    /// Inhibitory neurons that fired in the most recent step.
    std::span<const std::uint32_t> inhibitory_fired() const noexcept { return inh_fired_; }

    const Neuron& neuron(Population pop, std::size_t j) const { return population(pop).neurons.at(j); }
    const ReceptionProcess& reception(Population pop, std::size_t j) const { return population(pop).reception.at(j); }
    const PhaseLedger& ledger(Population pop, std::size_t j) const { return population(pop).ledger.at(j); }
    /// Conductances at the current clock, by kind.
    PhaseTotals conductance(Population pop, std::size_t j) const;
    /// Transmitter totals of the open phase at the current clock.
    PhaseTotals cluster_totals(Population pop, std::size_t j) const;
    double membrane_potential(Population pop, std::size_t j) const;

    NetworkState export_state() const;
    void import_state(const NetworkState& state);

private:
    struct PopulationState {
        std::vector<Neuron> neurons;
        std::vector<ReceptionProcess> reception;
        std::vector<PhaseLedger> ledger;
        std::vector<double> rec;     // current δ per cluster (1 when SPA is off)
        std::vector<double> g_exc;   // conductances at the start of the open step
        std::vector<double> g_inh;
        std::vector<double> snap_exc;  // conductance carried over from before the open phase
        std::vector<double> snap_inh;
        std::vector<std::uint64_t> phase_start;  // step index of the open phase's start
        std::vector<SynapseKind> out_kind;       // transmitter kind this neuron emits
        std::vector<std::uint64_t> last_spike;   // step of last emitted spike (+1; 0 = never)
    };

    const PopulationState& population(Population p) const noexcept {
        return p == Population::Excitatory ? exc_ : inh_;
    }
    double time_at(std::uint64_t step) const noexcept { return static_cast<double>(step) * config_.dt_ms; }
    void init_population(PopulationState& pop, std::size_t n, const NeuronParams& params,
                         const TypeMatrix& types, std::size_t type_offset, Rng& init_rng);
    void close_phase(PopulationState& pop, Population which, std::size_t j);
    std::size_t distinct_spiking(Population which, std::size_t j) const;
    void integrate(PopulationState& pop, double decay_v);

    NetworkConfig config_;
    std::vector<double> weights_;
    AdaptiveThreshold theta_;
    TraceState traces_;
    PopulationState exc_;
    PopulationState inh_;
    std::vector<std::uint64_t> last_input_spike_;  // step + 1; 0 = never
    std::vector<std::uint32_t> exc_fired_;
    std::vector<std::uint32_t> inh_fired_;
    std::vector<std::uint32_t> counts_;
    std::vector<SpikeEvent> events_;
    StepObserver observer_;
    Rng input_rng_;
    Rng spa_rng_;
    std::uint64_t step_ = 0;
    bool learning_ = true;
    bool counting_ = false;

    // Per-step constants.
    double decay_exc_ = 0.0;
    double decay_inh_ = 0.0;
    double integral_exc_ = 0.0;  // τ(1 − e^{−dt/τ}) for a unit conductance
    double integral_inh_ = 0.0;
    double decay_v_exc_ = 0.0;
    double decay_v_inh_ = 0.0;
    double decay_theta_ = 1.0;
};

}  // namespace spa
