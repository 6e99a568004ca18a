#include "spa/cli/run_config.hpp"

#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "spa/error.hpp"

namespace spa::cli {

namespace {

using nlohmann::json;

struct Key {
    std::function<void(RunConfig&, const json&)> set;
    std::function<json(const RunConfig&)> get;
};

#define SPA_KEY(name, type, expr)                                                                \
    {                                                                                            \
        name, Key {                                                                              \
            [](RunConfig& c, const json& v) { c.expr = v.get<type>(); },                         \
                [](const RunConfig& c) { return json(c.expr); }                                  \
        }                                                                                        \
    }

#define SPA_PATH_KEY(name, expr)                                                                 \
    {                                                                                            \
        name, Key {                                                                              \
            [](RunConfig& c, const json& v) { c.expr = v.get<std::string>(); },                  \
                [](const RunConfig& c) { return json(c.expr.string()); }                         \
        }                                                                                        \
    }

const std::map<std::string, Key>& keys() {
    static const std::map<std::string, Key> table = {
        SPA_KEY("neurons", std::size_t, network.n_excitatory),
        SPA_KEY("inputs", std::size_t, network.n_input),
        SPA_KEY("dt_ms", double, network.dt_ms),
        SPA_KEY("sample_ms", double, network.sample_ms),
        SPA_KEY("rest_ms", double, network.rest_ms),
        SPA_KEY("max_rate_hz", double, network.max_rate_hz),
        SPA_KEY("spa_enabled", bool, network.spa_enabled),
        SPA_KEY("seed", std::uint64_t, network.seed),
        SPA_KEY("tau1_ms", double, network.tau1_ms),
        SPA_KEY("tau2_ms", double, network.tau2_ms),
        SPA_KEY("tau_v_ms", double, network.excitatory.tau_v_ms),
        SPA_KEY("v_thr_mv", double, network.excitatory.v_thr_mv),
        SPA_KEY("v0_mv", double, network.excitatory.v0_mv),
        SPA_KEY("e_eq_mv", double, network.excitatory.e_eq_mv),
        SPA_KEY("t_ref_ms", double, network.excitatory.t_ref_ms),
        SPA_KEY("dv_a_max_mv", double, network.excitatory.dv_a_max_mv),
        SPA_KEY("k_v", double, network.excitatory.k_v),
        SPA_KEY("inh_tau_v_ms", double, network.inhibitory.tau_v_ms),
        SPA_KEY("inh_v_thr_mv", double, network.inhibitory.v_thr_mv),
        SPA_KEY("inh_v0_mv", double, network.inhibitory.v0_mv),
        SPA_KEY("inh_e_eq_mv", double, network.inhibitory.e_eq_mv),
        SPA_KEY("inh_t_ref_ms", double, network.inhibitory.t_ref_ms),
        SPA_KEY("inh_dv_a_max_mv", double, network.inhibitory.dv_a_max_mv),
        SPA_KEY("inh_k_v", double, network.inhibitory.k_v),
        SPA_KEY("sigma0", double, network.sigma0),
        SPA_KEY("delta0", double, network.delta0),
        SPA_KEY("mu_min", double, network.mu_min),
        SPA_KEY("mu_max", double, network.mu_max),
        SPA_KEY("k_min", std::size_t, network.k_min),
        SPA_KEY("w_init_max", double, network.w_init_max),
        SPA_KEY("w_exc_inh", double, network.w_exc_inh),
        SPA_KEY("w_inh_exc", double, network.w_inh_exc),
        SPA_KEY("min_spikes", std::size_t, network.min_spikes),
        SPA_KEY("max_retries", std::size_t, network.max_retries),
        SPA_KEY("rate_boost", double, network.rate_boost),
        SPA_KEY("a_plus", double, network.learning.stdp.a_plus),
        SPA_KEY("a_minus", double, network.learning.stdp.a_minus),
        SPA_KEY("tau_trace_ms", double, network.learning.stdp.tau_trace_ms),
        SPA_KEY("x_tar", double, network.learning.stdp.x_tar),
        SPA_KEY("w_max", double, network.learning.stdp.w_max),
        SPA_KEY("theta_plus_mv", double, network.learning.theta_plus_mv),
        SPA_KEY("tau_theta_ms", double, network.learning.tau_theta_ms),
        SPA_KEY("norm_target", double, network.learning.norm_target),
        {"stdp_mode",
         Key{[](RunConfig& c, const json& v) {
                 const auto mode = v.get<std::string>();
                 if (mode == "trace") {
                     c.network.learning.stdp.mode = StdpMode::TraceSoftBound;
                 } else if (mode == "post-exp") {
                     c.network.learning.stdp.mode = StdpMode::PostOnlyExp;
                 } else {
                     throw Error(ErrorKind::Config, "stdp_mode must be \"trace\" or \"post-exp\"");
                 }
             },
             [](const RunConfig& c) {
                 return json(c.network.learning.stdp.mode == StdpMode::TraceSoftBound ? "trace" : "post-exp");
             }}},
        {"dataset", Key{[](RunConfig& c, const json& v) { c.dataset = parse_dataset_kind(v.get<std::string>()); },
                        [](const RunConfig& c) { return json(std::string(to_string(c.dataset))); }}},
        SPA_PATH_KEY("dataset_dir", dataset_dir),
        SPA_KEY("samples", std::size_t, samples),
        SPA_KEY("passes", std::size_t, passes),
        SPA_KEY("assign_samples", std::size_t, assign_samples),
        SPA_KEY("test_samples", std::size_t, test_samples),
        SPA_KEY("ckpt_every", std::size_t, ckpt_every),
        SPA_PATH_KEY("checkpoint", checkpoint),
        SPA_PATH_KEY("metrics_out", metrics_out),
        SPA_PATH_KEY("report_out", report_out),
        SPA_PATH_KEY("traces_out", traces_out),
        SPA_KEY("trace_every", std::size_t, trace_every),
        SPA_KEY("accuracy_window", std::size_t, accuracy_window),
        SPA_KEY("assign_every", std::size_t, assign_every),
    };
    return table;
}

#undef SPA_KEY
#undef SPA_PATH_KEY

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorKind::Config, message);
}

}  // namespace

void apply_json(RunConfig& config, const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    require(doc.is_object(), "config must be a JSON object");
    const auto& table = keys();
    for (const auto& [name, value] : doc.items()) {
        const auto it = table.find(name);
        require(it != table.end(), "unknown config key: " + name);
        try {
            it->second.set(config, value);
        } catch (const json::exception&) {
            throw Error(ErrorKind::Config, "wrong type for config key: " + name);
        }
    }
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    std::ostringstream text;
    text << file.rdbuf();
    apply_json(config, text.str());
}

void validate(const RunConfig& c) {
    const auto& n = c.network;
    require(n.n_excitatory > 0, "neurons must be positive");
    require(n.n_input > 0, "inputs must be positive");
    require(n.dt_ms > 0.0, "dt_ms must be positive");
    require(n.sample_ms > 0.0, "sample_ms must be positive");
    require(n.rest_ms >= 0.0, "rest_ms must be nonnegative");
    require(n.max_rate_hz > 0.0 && n.max_rate_hz * n.dt_ms / 1000.0 <= 1.0,
            "max_rate_hz must be positive and below one spike per step");
    require(n.tau1_ms > 0.0 && n.tau2_ms > 0.0, "transmitter decay constants must be positive");
    for (const NeuronParams* p : {&n.excitatory, &n.inhibitory}) {
        require(p->tau_v_ms > 0.0, "membrane time constants must be positive");
        require(p->e_eq_mv < p->v_thr_mv, "equilibrium potential must lie below threshold");
        require(p->v0_mv < p->v_thr_mv, "rest potential must lie below threshold");
        require(p->t_ref_ms >= 0.0, "refractory periods must be nonnegative");
        require(p->dv_a_max_mv >= 0.0, "dv_a_max_mv must be nonnegative");
        require(p->k_v > 0.0, "k_v must be positive");
    }
    require(n.sigma0 > 0.0, "sigma0 must be positive");
    require(n.delta0 > 0.0 && n.delta0 < 1.0, "delta0 must lie in (0, 1)");
    require(n.mu_min <= n.mu_max, "mu_min must not exceed mu_max");
    require(n.w_init_max >= 0.0 && n.w_exc_inh >= 0.0 && n.w_inh_exc >= 0.0, "weights must be nonnegative");
    require(n.rate_boost >= 0.0, "rate_boost must be nonnegative");
    const auto& l = n.learning;
    require(l.stdp.a_plus >= 0.0 && l.stdp.a_minus >= 0.0, "learning rates must be nonnegative");
    require(l.stdp.tau_trace_ms > 0.0, "tau_trace_ms must be positive");
    require(l.stdp.w_max > 0.0, "w_max must be positive");
    require(l.theta_plus_mv >= 0.0, "theta_plus_mv must be nonnegative");
    require(l.tau_theta_ms > 0.0, "tau_theta_ms must be positive");
    require(l.norm_target > 0.0, "norm_target must be positive");
    require(c.passes > 0, "passes must be positive");
    require(c.assign_samples > 0, "assign_samples must be positive");
    require(c.trace_every > 0, "trace_every must be positive");
    require(c.accuracy_window > 0 && c.assign_every > 0, "accuracy_window and assign_every must be positive");
}

std::string to_json(const RunConfig& config) {
    json doc = json::object();
    for (const auto& [name, key] : keys()) doc[name] = key.get(config);
    return doc.dump();
}

}  // namespace spa::cli
