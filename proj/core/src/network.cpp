#include "spa/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spa/error.hpp"

namespace spa {
namespace {

Rng make_stream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    return Rng(seq);
}

std::string rng_to_string(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

void rng_from_string(Rng& rng, const std::string& text) {
    std::istringstream is(text);
    Rng restored;
    is >> restored;
    if (!is) {
        throw Error(ErrorKind::Format, "unreadable random engine state");
    }
    rng = restored;
}

std::size_t steps_for(double duration_ms, double dt_ms) {
    return static_cast<std::size_t>(std::llround(duration_ms / dt_ms));
}

}  // namespace

TypeMatrix::TypeMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw Error(ErrorKind::Dimension, "type matrix entries do not fill rows x cols");
    }
    for (auto e : entries_) {
        if (e > 1) {
            throw Error(ErrorKind::Domain, "type matrix entries must be 0 or 1");
        }
    }
}

TypeMatrix TypeMatrix::standard(std::size_t n_excitatory) {
    std::vector<std::uint8_t> entries(2 * n_excitatory, 0);
    std::fill_n(entries.begin(), n_excitatory, std::uint8_t{1});
    return TypeMatrix(2, n_excitatory, std::move(entries));
}

SynapseKind TypeMatrix::kind(std::size_t neuron) const {
    return entries_.at(neuron) ? SynapseKind::Excitatory : SynapseKind::Inhibitory;
}

SpikeTrains::SpikeTrains(std::size_t n_sources, std::size_t n_steps, double dt_ms,
                         std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> sources)
    : n_sources_(n_sources), n_steps_(n_steps), dt_ms_(dt_ms), offsets_(std::move(offsets)),
      sources_(std::move(sources)) {
    if (offsets_.size() != n_steps_ + 1 || offsets_.back() != sources_.size()) {
        throw Error(ErrorKind::Dimension, "spike train offsets do not match the step count");
    }
}

std::vector<std::size_t> SpikeTrains::counts_per_source() const {
    std::vector<std::size_t> counts(n_sources_, 0);
    for (auto s : sources_) {
        ++counts[s];
    }
    return counts;
}

SpikeTrains encode_poisson(std::span<const std::uint8_t> image, double duration_ms, double dt_ms,
                           double max_rate_hz, Rng& rng) {
    if (!(duration_ms > 0.0) || !(dt_ms > 0.0)) {
        throw Error(ErrorKind::Domain, "encoding needs positive duration and dt");
    }
    const std::size_t n_steps = steps_for(duration_ms, dt_ms);
    std::vector<std::uint32_t> per_step(n_steps + 1, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> spikes;  // (step, pixel)

    for (std::size_t i = 0; i < image.size(); ++i) {
        if (image[i] == 0) {
            continue;
        }
        const double rate = image[i] / 255.0 * max_rate_hz;
        const double p = std::min(1.0, rate * dt_ms * 1e-3);
        // Gaps between Bernoulli successes are geometric.
        std::geometric_distribution<std::int64_t> gap(p);
        std::int64_t k = -1;
        while (true) {
            k += 1 + gap(rng);
            if (k >= static_cast<std::int64_t>(n_steps)) {
                break;
            }
            spikes.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i));
            ++per_step[static_cast<std::size_t>(k) + 1];
        }
    }
    std::partial_sum(per_step.begin(), per_step.end(), per_step.begin());
    std::vector<std::uint32_t> sources(spikes.size());
    std::vector<std::uint32_t> cursor(per_step.begin(), per_step.end() - 1);
    // Pixels were visited in ascending order, so each step's slice stays sorted.
    for (const auto& [step, pixel] : spikes) {
        sources[cursor[step]++] = pixel;
    }
    return SpikeTrains(image.size(), n_steps, dt_ms, std::move(per_step), std::move(sources));
}

std::uint64_t SampleResult::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Network::Network(const NetworkConfig& config) : Network(config, TypeMatrix::standard(config.n_excitatory)) {}

Network::Network(const NetworkConfig& config, const TypeMatrix& types)
    : config_(config), input_rng_(make_stream(config.seed, 2)), spa_rng_(make_stream(config.seed, 3)) {
    const std::size_t n = config_.n_excitatory;
    if (n == 0 || config_.n_input == 0) {
        throw Error(ErrorKind::Domain, "network needs at least one input and one excitatory neuron");
    }
    if (types.size() != 2 * n) {
        throw Error(ErrorKind::Dimension, "type matrix has " + std::to_string(types.size()) +
                                              " entries, expected " + std::to_string(2 * n));
    }
    if (!(config_.dt_ms > 0.0) || !(config_.tau1_ms > 0.0) || !(config_.tau2_ms > 0.0)) {
        throw Error(ErrorKind::Domain, "dt and transmitter decay constants must be positive");
    }
    if (!(config_.mu_min <= config_.mu_max)) {
        throw Error(ErrorKind::Domain, "mu_min must not exceed mu_max");
    }

    Rng init_rng = make_stream(config_.seed, 1);
    std::uniform_real_distribution<double> init_weight(0.0, config_.w_init_max);
    weights_.resize(config_.n_input * n);
    for (double& w : weights_) {
        w = init_weight(init_rng);
    }

    const auto& lp = config_.learning;
    theta_ = AdaptiveThreshold(n, lp.theta_plus_mv, lp.tau_theta_ms);
    traces_.pre = SpikeTraces(config_.n_input, lp.stdp.tau_trace_ms, config_.dt_ms);
    traces_.post = SpikeTraces(n, lp.stdp.tau_trace_ms, config_.dt_ms);

    init_population(exc_, n, config_.excitatory, types, 0, init_rng);
    init_population(inh_, n, config_.inhibitory, types, n, init_rng);

    last_input_spike_.assign(config_.n_input, 0);
    counts_.assign(n, 0);

    const double dt = config_.dt_ms;
    decay_exc_ = std::exp(-dt / config_.tau1_ms);
    decay_inh_ = std::exp(-dt / config_.tau2_ms);
    integral_exc_ = config_.tau1_ms * -std::expm1(-dt / config_.tau1_ms);
    integral_inh_ = config_.tau2_ms * -std::expm1(-dt / config_.tau2_ms);
    decay_v_exc_ = std::exp(-dt / config_.excitatory.tau_v_ms);
    decay_v_inh_ = std::exp(-dt / config_.inhibitory.tau_v_ms);
    decay_theta_ = std::exp(-dt / lp.tau_theta_ms);
}

void Network::init_population(PopulationState& pop, std::size_t n, const NeuronParams& params,
                              const TypeMatrix& types, std::size_t type_offset, Rng& init_rng) {
    std::uniform_real_distribution<double> mean(config_.mu_min, config_.mu_max);
    pop.neurons.assign(n, Neuron(params));
    pop.reception.clear();
    pop.reception.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double mu = config_.mu_min == config_.mu_max ? config_.mu_min : mean(init_rng);
        pop.reception.emplace_back(mu, config_.sigma0, config_.delta0);
    }
    pop.ledger.assign(n, PhaseLedger{});
    pop.rec.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        pop.rec[j] = config_.spa_enabled ? pop.reception[j].value() : 1.0;
    }
    pop.g_exc.assign(n, 0.0);
    pop.g_inh.assign(n, 0.0);
    pop.snap_exc.assign(n, 0.0);
    pop.snap_inh.assign(n, 0.0);
    pop.phase_start.assign(n, 0);
    pop.out_kind.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        pop.out_kind[j] = types.kind(type_offset + j);
    }
    pop.last_spike.assign(n, 0);
}

std::span<const SpikeEvent> Network::step(std::span<const std::uint32_t> input_spikes) {
    const std::size_t n = config_.n_excitatory;
    const double t = time_at(step_);
    const auto& stdp = config_.learning.stdp;
    events_.clear();

    if (learning_) {
        traces_.pre.advance();
        traces_.post.advance();
        theta_.decay_all(decay_theta_);
    }

    exc_fired_.clear();
    inh_fired_.clear();
    for (std::size_t j = 0; j < n; ++j) {
        if (exc_.neurons[j].fire_check(t, theta_[j])) {
            exc_fired_.push_back(static_cast<std::uint32_t>(j));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (inh_.neurons[j].fire_check(t)) {
            inh_fired_.push_back(static_cast<std::uint32_t>(j));
        }
    }

    // Post events: counts, θ, potentiation, phase close.
    const double* x_pre = traces_.pre.values().data();
    for (std::uint32_t j : exc_fired_) {
        if (counting_) {
            ++counts_[j];
        }
        if (learning_) {
            theta_.on_fire(j);
            traces_.post.on_spike(j);
            double* col = weights_.data() + j;
            for (std::size_t i = 0; i < config_.n_input; ++i) {
                double& w = col[i * n];
                w += stdp_update(w, x_pre[i], StdpEvent::Post, stdp);
            }
        }
        if (config_.spa_enabled) {
            close_phase(exc_, Population::Excitatory, j);
        }
    }
    if (config_.spa_enabled) {
        for (std::uint32_t j : inh_fired_) {
            close_phase(inh_, Population::Inhibitory, j);
        }
    }
    for (std::uint32_t j : exc_fired_) {
        exc_.last_spike[j] = step_ + 1;
    }
    for (std::uint32_t j : inh_fired_) {
        inh_.last_spike[j] = step_ + 1;
    }

    // Input spikes: conductance onto every excitatory cluster, pre-event depression.
    const bool depress = learning_ && stdp.mode == StdpMode::TraceSoftBound;
    const double* x_post = traces_.post.values().data();
    double* g = exc_.g_exc.data();
    const double* rec = exc_.rec.data();
    for (std::uint32_t i : input_spikes) {
        last_input_spike_[i] = step_ + 1;
        double* row = weights_.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t j = 0; j < n; ++j) {
            g[j] += rec[j] * row[j];
        }
        if (learning_) {
            traces_.pre.on_spike(i);
        }
        if (depress) {
            for (std::size_t j = 0; j < n; ++j) {
                row[j] += stdp_update(row[j], x_post[j], StdpEvent::Pre, stdp);
            }
        }
    }

    // Recurrent delivery of the fires at t.
    for (std::uint32_t j : exc_fired_) {
        const double amount = inh_.rec[j] * config_.w_exc_inh;
        (exc_.out_kind[j] == SynapseKind::Excitatory ? inh_.g_exc : inh_.g_inh)[j] += amount;
        events_.push_back({j, static_cast<std::uint32_t>(n + j), t});
    }
    for (std::uint32_t j : inh_fired_) {
        auto& target = inh_.out_kind[j] == SynapseKind::Excitatory ? exc_.g_exc : exc_.g_inh;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) {
                continue;
            }
            target[k] += exc_.rec[k] * config_.w_inh_exc;
            events_.push_back({static_cast<std::uint32_t>(n + j), static_cast<std::uint32_t>(k), t});
        }
    }

    integrate(exc_, decay_v_exc_);
    integrate(inh_, decay_v_inh_);
    ++step_;
    return events_;
}

void Network::integrate(PopulationState& pop, double decay_v) {
    const double t = time_at(step_);
    const double t_next = time_at(step_ + 1);
    const std::size_t n = pop.neurons.size();
    for (std::size_t j = 0; j < n; ++j) {
        Neuron& neuron = pop.neurons[j];
        const double ig_exc = pop.g_exc[j] * integral_exc_;
        const double ig_inh = pop.g_inh[j] * integral_inh_;
        if (ig_exc != 0.0 || ig_inh != 0.0) {
            const double v = neuron.membrane_potential(t);
            const double effect = neuron.spike_effect(ig_exc, SynapseKind::Excitatory, v) +
                                  neuron.spike_effect(ig_inh, SynapseKind::Inhibitory, v);
            neuron.integrate_step(effect, t_next, decay_v);
        } else {
            neuron.integrate_step(0.0, t_next, decay_v);
        }
        pop.g_exc[j] *= decay_exc_;
        pop.g_inh[j] *= decay_inh_;
    }
    if (config_.spa_enabled) {
        for (std::size_t j = 0; j < n; ++j) {
            pop.snap_exc[j] *= decay_exc_;
            pop.snap_inh[j] *= decay_inh_;
        }
    }
}

void Network::close_phase(PopulationState& pop, Population which, std::size_t j) {
    const double t = time_at(step_);
    PhaseLedger& ledger = pop.ledger[j];
    ledger.push(cluster_totals(which, j));
    if (ledger.completed() >= 2) {
        pop.neurons[j].repolarize(ledger.previous(), ledger.current());
    }

    ReceptionProcess& rp = pop.reception[j];
    if (rp.boundary_count() == 0 || t > rp.last_boundary()) {
        if (rp.boundary_count() >= 2) {
            rp.adapt_variance(t);
        } else {
            rp.mark_boundary(t);
        }
    }
    if (distinct_spiking(which, j) < config_.k_min) {
        rp.reset_variance();
    }
    pop.rec[j] = rp.sample(spa_rng_);
    pop.snap_exc[j] = pop.g_exc[j];
    pop.snap_inh[j] = pop.g_inh[j];
    pop.phase_start[j] = step_;
}

std::size_t Network::distinct_spiking(Population which, std::size_t j) const {
    const auto& pop = population(which);
    const std::uint64_t start = pop.phase_start[j];
    std::size_t count = 0;
    if (which == Population::Excitatory) {
        for (auto s : last_input_spike_) {
            count += s > start;
        }
        for (std::size_t k = 0; k < inh_.last_spike.size(); ++k) {
            count += k != j && inh_.last_spike[k] > start;
        }
    } else {
        count += exc_.last_spike[j] > start;
    }
    return count;
}

void Network::begin_sample() {
    std::fill(counts_.begin(), counts_.end(), 0u);
    counting_ = true;
    if (!config_.spa_enabled) {
        return;
    }
    const double t = time_at(step_);
    for (PopulationState* pop : {&exc_, &inh_}) {
        for (std::size_t j = 0; j < pop->neurons.size(); ++j) {
            pop->reception[j].restart(t);
            pop->rec[j] = pop->reception[j].sample(spa_rng_);
            pop->snap_exc[j] = pop->g_exc[j];
            pop->snap_inh[j] = pop->g_inh[j];
            pop->phase_start[j] = step_;
        }
    }
}

void Network::end_sample() {
    counting_ = false;
    for (PopulationState* pop : {&exc_, &inh_}) {
        for (auto& neuron : pop->neurons) {
            neuron.reset_membrane();
        }
        std::fill(pop->g_exc.begin(), pop->g_exc.end(), 0.0);
        std::fill(pop->g_inh.begin(), pop->g_inh.end(), 0.0);
        std::fill(pop->snap_exc.begin(), pop->snap_exc.end(), 0.0);
        std::fill(pop->snap_inh.begin(), pop->snap_inh.end(), 0.0);
    }
    traces_.pre.reset();
    traces_.post.reset();
}

std::vector<std::uint32_t> Network::present(const SpikeTrains& trains) {
    if (trains.n_sources() != config_.n_input) {
        throw Error(ErrorKind::Dimension, "spike trains do not match the input layer size");
    }
    if (trains.dt_ms() != config_.dt_ms) {
        throw Error(ErrorKind::Dimension, "spike trains use a different time step");
    }
    begin_sample();
    for (std::size_t k = 0; k < trains.n_steps(); ++k) {
        step(trains.at(k));
        if (observer_) {
            observer_(*this, k);
        }
    }
    counting_ = false;
    const std::size_t rest_steps = steps_for(config_.rest_ms, config_.dt_ms);
    for (std::size_t k = 0; k < rest_steps; ++k) {
        step({});
    }
    end_sample();
    return counts_;
}

SampleResult Network::run_sample(std::span<const std::uint8_t> image) {
    if (image.size() != config_.n_input) {
        throw Error(ErrorKind::Dimension, "image size does not match the input layer");
    }
    SampleResult result;
    for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
        const double rate = config_.max_rate_hz * (1.0 + config_.rate_boost * static_cast<double>(attempt));
        const SpikeTrains trains = encode_poisson(image, config_.sample_ms, config_.dt_ms, rate, input_rng_);
        result.counts = present(trains);
        result.attempts = attempt + 1;
        if (result.total() >= config_.min_spikes) {
            return result;
        }
    }
    result.low_activity = true;
    return result;
}

void Network::normalize_input_weights() {
    normalize_weights(weights_, config_.n_input, config_.n_excitatory, config_.learning.norm_target,
                      config_.learning.stdp.w_max);
}

PhaseTotals Network::conductance(Population which, std::size_t j) const {
    const auto& pop = population(which);
    return {pop.g_exc.at(j), pop.g_inh.at(j)};
}

PhaseTotals Network::cluster_totals(Population which, std::size_t j) const {
    const auto& pop = population(which);
    if (!config_.spa_enabled) {
        return {pop.g_exc.at(j), pop.g_inh.at(j)};
    }
    return {std::max(0.0, pop.g_exc.at(j) - pop.snap_exc.at(j)), std::max(0.0, pop.g_inh.at(j) - pop.snap_inh.at(j))};
}

double Network::membrane_potential(Population which, std::size_t j) const {
    return population(which).neurons.at(j).membrane_potential(clock_ms());
}

NetworkState Network::export_state() const {
    NetworkState s;
    s.weights = weights_;
    s.theta.assign(theta_.values().begin(), theta_.values().end());
    for (const PopulationState* pop : {&exc_, &inh_}) {
        for (std::size_t j = 0; j < pop->neurons.size(); ++j) {
            s.v_res.push_back(pop->neurons[j].v_res());
            s.reception_mean.push_back(pop->reception[j].mean());
            s.reception_sigma.push_back(pop->reception[j].sigma());
            s.reception_value.push_back(pop->reception[j].value());
            const PhaseLedger& l = pop->ledger[j];
            s.ledger.insert(s.ledger.end(), {static_cast<double>(l.completed()), l.previous().excitatory,
                                             l.previous().inhibitory, l.current().excitatory, l.current().inhibitory});
        }
    }
    s.step_index = step_;
    s.input_rng = rng_to_string(input_rng_);
    s.spa_rng = rng_to_string(spa_rng_);
    return s;
}

void Network::import_state(const NetworkState& s) {
    const std::size_t n = config_.n_excitatory;
    if (s.weights.size() != weights_.size() || s.theta.size() != n || s.v_res.size() != 2 * n ||
        s.reception_mean.size() != 2 * n || s.reception_sigma.size() != 2 * n ||
        s.reception_value.size() != 2 * n || s.ledger.size() != 10 * n) {
        throw Error(ErrorKind::Dimension, "network state does not match the configured network");
    }
    Rng input_rng;
    Rng spa_rng;
    rng_from_string(input_rng, s.input_rng);
    rng_from_string(spa_rng, s.spa_rng);

    weights_ = s.weights;
    std::copy(s.theta.begin(), s.theta.end(), theta_.values().begin());
    std::size_t k = 0;
    for (PopulationState* pop : {&exc_, &inh_}) {
        for (std::size_t j = 0; j < pop->neurons.size(); ++j, ++k) {
            pop->neurons[j].set_v_res(s.v_res[k]);
            pop->reception[j] = ReceptionProcess(s.reception_mean[k], config_.sigma0, config_.delta0);
            pop->reception[j].restore(s.reception_sigma[k], s.reception_value[k]);
            pop->rec[j] = config_.spa_enabled ? s.reception_value[k] : 1.0;
            const double* l = s.ledger.data() + 5 * k;
            pop->ledger[j].restore(static_cast<std::size_t>(l[0]), {l[1], l[2]}, {l[3], l[4]});
        }
    }
    step_ = s.step_index;
    input_rng_ = input_rng;
    spa_rng_ = spa_rng;
    end_sample();
}

}  // namespace spa
