#include "spa/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "spa/error.hpp"

namespace spa::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
    return std::filesystem::path(path.string() + suffix);
}

void check_sample_count(const RunConfig& config, const Dataset& train) {
    if (config.samples > train.size()) {
        throw Error(ErrorKind::Config, "samples (" + std::to_string(config.samples) + ") exceeds the training split (" +
                                           std::to_string(train.size()) + ")");
    }
    if (train.images.pixels_per_image() != config.network.n_input) {
        throw Error(ErrorKind::Dimension, "dataset images have " + std::to_string(train.images.pixels_per_image()) +
                                              " pixels, network expects " + std::to_string(config.network.n_input));
    }
}

/// Labels from the most recent samples, refreshed on a fixed period.
class OnlineAssigner {
public:
    OnlineAssigner(const RunConfig& config, std::size_t n_neurons, std::size_t n_classes)
        : window_(config.accuracy_window), every_(config.assign_every), n_classes_(n_classes), tally_(n_neurons, n_classes) {}

    /// Predicts `counts` with the current labels, then records the sample.
    std::optional<int> observe(const std::vector<std::uint32_t>& counts, std::size_t label) {
        std::optional<int> prediction;
        if (!assignments_.empty()) prediction = classify(counts, assignments_, n_classes_).label;
        history_.emplace_back(counts, label);
        if (history_.size() > window_) history_.pop_front();
        if (++seen_ % every_ == 0) refresh();
        return prediction;
    }

    const std::vector<int>& assignments() const noexcept { return assignments_; }

private:
    void refresh() {
        tally_.clear();
        for (const auto& [counts, label] : history_) tally_.add(counts, label);
        assignments_ = assign_labels(tally_);
    }

    std::size_t window_;
    std::size_t every_;
    std::size_t n_classes_;
    SpikeTally tally_;
    std::deque<std::pair<std::vector<std::uint32_t>, std::size_t>> history_;
    std::vector<int> assignments_;
    std::size_t seen_ = 0;
};

struct TraceRecorder {
    std::ofstream out;
    std::uint64_t sample_index = 0;

    void record(const Network& net, std::size_t) {
        const std::size_t n = net.n_excitatory();
        double v = 0.0;
        double g = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v += net.membrane_potential(Population::Excitatory, j);
            g += net.conductance(Population::Excitatory, j).excitatory;
        }
        const double rate_hz = static_cast<double>(net.excitatory_fired().size()) /
                               (static_cast<double>(n) * net.config().dt_ms) * 1000.0;
        out << sample_index << ',' << format_double(net.clock_ms()) << ',' << format_double(v / static_cast<double>(n))
            << ',' << format_double(g / static_cast<double>(n)) << ',' << format_double(rate_hz) << '\n';
    }
};

double parse_number(std::string_view field) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::Format, "bad number in trace file: " + std::string(field));
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> assignment_indices(const RunConfig& config, std::size_t train_size) {
    const std::size_t stream = config.samples == 0 ? std::min(config.assign_samples, train_size) : config.samples;
    const std::size_t count = std::min(config.assign_samples, stream);
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = stream - count + k;
    return out;
}

Checkpoint make_checkpoint(const RunConfig& config, const Network& net, std::uint64_t samples_seen,
                           std::vector<int> assignments) {
    Checkpoint ckpt;
    ckpt.config_json = to_json(config);
    ckpt.n_input = net.n_input();
    ckpt.n_excitatory = net.n_excitatory();
    ckpt.samples_seen = samples_seen;
    ckpt.state = net.export_state();
    ckpt.assignments = std::move(assignments);
    return ckpt;
}

Network restore_network(const RunConfig& config, const Checkpoint& ckpt) {
    check_compatible(ckpt, config.network.n_input, config.network.n_excitatory);
    Network net(config.network);
    net.import_state(ckpt.state);
    return net;
}

TrainSummary train_on(const RunConfig& config, const Dataset& train, std::ostream& log) {
    validate(config);
    check_sample_count(config, train);

    Network net(config.network);
    std::ofstream metrics;
    std::ofstream timing;
    if (!config.metrics_out.empty()) {
        metrics = open_output(config.metrics_out);
        timing = open_output(with_suffix(config.metrics_out, ".timing.csv"));
        metrics << "sample_index,train_accuracy,spikes,retries,low_activity,checkpoint\n";
        timing << "sample_index,wall_ms\n";
    }
    TraceRecorder recorder;
    if (!config.traces_out.empty()) {
        recorder.out = open_output(config.traces_out);
        recorder.out << "sample_index,time_ms,membrane_potential,conductance,spike_rate\n";
    }

    OnlineAssigner online(config, net.n_excitatory(), train.n_classes());
    TrainSummary summary;
    std::size_t predicted = 0;
    std::size_t correct = 0;
    const std::size_t total = config.samples * config.passes;
    double wall_total = 0.0;
    summary.spikes_per_sample.reserve(total);
    summary.wall_ms.reserve(total);

    for (std::size_t s = 0; s < total; ++s) {
        const std::size_t index = s % config.samples;
        const bool tracing = recorder.out.is_open() && s % config.trace_every == 0;
        if (tracing) {
            recorder.sample_index = s;
            net.set_step_observer([&recorder](const Network& n, std::size_t k) { recorder.record(n, k); });
        }

        const auto start = Clock::now();
        net.normalize_input_weights();
        const SampleResult result = net.run_sample(train.image(index));
        const double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        if (tracing) net.set_step_observer({});

        const auto label = static_cast<std::size_t>(train.labels[index]);
        if (const auto guess = online.observe(result.counts, label)) {
            ++predicted;
            correct += static_cast<std::size_t>(*guess) == label;
        }
        summary.total_spikes += result.total();
        summary.spikes_per_sample.push_back(result.total());
        summary.wall_ms.push_back(wall_ms);
        summary.low_activity += result.low_activity;
        wall_total += wall_ms;

        const bool ckpt_now = config.ckpt_every > 0 && (s + 1) % config.ckpt_every == 0 && s + 1 < total;
        if (ckpt_now) save_checkpoint(make_checkpoint(config, net, s + 1, online.assignments()), config.checkpoint);

        const double accuracy = predicted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted);
        if (metrics.is_open()) {
            metrics << s << ',' << format_double(accuracy) << ',' << result.total() << ',' << result.attempts - 1 << ','
                    << (result.low_activity ? 1 : 0) << ',' << (ckpt_now ? 1 : 0) << '\n';
            timing << s << ',' << format_double(wall_ms) << '\n';
        }
        if ((s + 1) % 1000 == 0) {
            log << "train " << (s + 1) << '/' << total << " online_accuracy=" << std::fixed << std::setprecision(4)
                << accuracy << " ms/sample=" << std::setprecision(3) << wall_total / static_cast<double>(s + 1)
                << std::defaultfloat << '\n';
        }
        summary.online_accuracy = accuracy;
    }

    save_checkpoint(make_checkpoint(config, net, total, online.assignments()), config.checkpoint);
    summary.samples = total;
    summary.wall_ms_per_sample = total == 0 ? 0.0 : wall_total / static_cast<double>(total);
    return summary;
}

EvalReport evaluate_on(const RunConfig& config, const Checkpoint& ckpt, const Dataset& train, const Dataset& test,
                       std::ostream& log) {
    validate(config);
    Network net = restore_network(config, ckpt);
    net.set_learning(false);

    const std::size_t n_classes = train.n_classes();
    const auto assign_idx = assignment_indices(config, train.size());
    if (assign_idx.empty()) throw Error(ErrorKind::Config, "label assignment stream is empty");
    SpikeTally tally(net.n_excitatory(), n_classes);
    std::vector<std::vector<std::uint32_t>> assign_counts;
    assign_counts.reserve(assign_idx.size());
    EvalReport report;
    for (std::size_t k = 0; k < assign_idx.size(); ++k) {
        const std::size_t i = assign_idx[k];
        auto result = net.run_sample(train.image(i));
        report.low_activity += result.low_activity;
        tally.add(result.counts, train.labels[i]);
        assign_counts.push_back(std::move(result.counts));
        if ((k + 1) % 2000 == 0) log << "assign " << (k + 1) << '/' << assign_idx.size() << '\n';
    }
    report.assignments = assign_labels(tally);
    report.assign_samples = assign_idx.size();

    std::size_t train_correct = 0;
    for (std::size_t k = 0; k < assign_idx.size(); ++k) {
        train_correct += classify(assign_counts[k], report.assignments, n_classes).label == train.labels[assign_idx[k]];
    }
    report.train_accuracy = static_cast<double>(train_correct) / static_cast<double>(assign_idx.size());

    const std::size_t n_test = config.test_samples == 0 ? test.size() : std::min(config.test_samples, test.size());
    report.confusion = ConfusionMatrix(n_classes);
    report.spikes_per_sample.reserve(n_test);
    for (std::size_t i = 0; i < n_test; ++i) {
        const auto result = net.run_sample(test.image(i));
        report.low_activity += result.low_activity;
        report.spikes_per_sample.push_back(result.total());
        const Prediction p = classify(result.counts, report.assignments, n_classes);
        report.fallbacks += p.fallback;
        report.confusion.add(test.labels[i], static_cast<std::size_t>(p.label));
        if ((i + 1) % 2000 == 0) log << "test " << (i + 1) << '/' << n_test << '\n';
    }
    report.test_samples = n_test;
    report.accuracy = report.confusion.accuracy();

    if (!config.report_out.empty()) {
        nlohmann::json doc;
        doc["accuracy"] = report.accuracy;
        doc["train_accuracy"] = report.train_accuracy;
        doc["test_samples"] = report.test_samples;
        doc["assign_samples"] = report.assign_samples;
        doc["fallbacks"] = report.fallbacks;
        doc["low_activity"] = report.low_activity;
        doc["assignments"] = report.assignments;
        auto& rows = doc["confusion"] = nlohmann::json::array();
        for (std::size_t t = 0; t < n_classes; ++t) {
            std::vector<std::uint64_t> row(n_classes);
            for (std::size_t p = 0; p < n_classes; ++p) row[p] = report.confusion.at(t, p);
            rows.push_back(row);
        }
        open_output(config.report_out) << doc.dump(2) << '\n';

        auto csv = open_output(with_suffix(config.report_out, ".confusion.csv"));
        csv << "truth";
        for (std::size_t p = 0; p < n_classes; ++p) csv << ",pred_" << p;
        csv << '\n';
        for (std::size_t t = 0; t < n_classes; ++t) {
            csv << t;
            for (std::size_t p = 0; p < n_classes; ++p) csv << ',' << report.confusion.at(t, p);
            csv << '\n';
        }
    }
    return report;
}

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
    validate(config);
    const Dataset train = load_dataset(config.dataset_dir, config.dataset, Split::Train);
    return train_on(config, train, log);
}

EvalReport cmd_eval(const RunConfig& config, std::ostream& log) {
    validate(config);
    const Checkpoint ckpt = load_checkpoint(config.checkpoint);
    check_compatible(ckpt, config.network.n_input, config.network.n_excitatory);
    const Dataset train = load_dataset(config.dataset_dir, config.dataset, Split::Train);
    const Dataset test = load_dataset(config.dataset_dir, config.dataset, Split::Test);
    return evaluate_on(config, ckpt, train, test, log);
}

ForecastSummary cmd_forecast(const std::filesystem::path& traces, const std::filesystem::path& out,
                             std::ostream& log) {
    std::ifstream in(traces);
    if (!in) throw Error(ErrorKind::Io, "cannot open trace file " + traces.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, "empty trace file");
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "sample_index" || header[1] != "time_ms") {
        throw Error(ErrorKind::Format, "trace file must start with sample_index,time_ms columns");
    }
    std::vector<std::string> observables(header.begin() + 2, header.end());

    struct Window {
        std::vector<double> times;
        std::vector<std::vector<double>> values;
    };
    std::map<std::uint64_t, Window> windows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) throw Error(ErrorKind::Format, "ragged row in trace file");
        auto& w = windows[static_cast<std::uint64_t>(parse_number(fields[0]))];
        if (w.values.empty()) w.values.resize(observables.size());
        w.times.push_back(parse_number(fields[1]));
        for (std::size_t o = 0; o < observables.size(); ++o) w.values[o].push_back(parse_number(fields[o + 2]));
    }

    ForecastSummary summary;
    for (auto& [sample, w] : windows) {
        if (w.times.size() < 2) {
            for (const auto& name : observables) summary.skipped.push_back({sample, name, "window too short"});
            continue;
        }
        const double interval = w.times[1] - w.times[0];
        for (std::size_t o = 0; o < observables.size(); ++o) {
            try {
                const ForecastWindow win = make_window(observables[o], std::move(w.values[o]), interval);
                for (double h : kForecastHorizonsMs) {
                    summary.records.push_back({sample, diagnose(win, h)});
                }
            } catch (const Error& e) {
                summary.skipped.push_back({sample, observables[o], e.what()});
            }
        }
    }

    auto csv = open_output(out);
    csv << "sample_index,observable,horizon_ms,e,e_bar,pass\n";
    for (const auto& r : summary.records) {
        csv << r.sample_index << ',' << r.report.observable << ',' << format_double(r.report.horizon_ms) << ','
            << format_double(r.report.e) << ',' << format_double(r.report.e_bar) << ',' << (r.report.pass ? 1 : 0)
            << '\n';
    }
    for (const auto& s : summary.skipped) {
        log << "forecast skipped: sample " << s.sample_index << ' ' << s.observable << ": " << s.reason << '\n';
    }
    return summary;
}

std::string cmd_inspect(const std::filesystem::path& checkpoint) {
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    auto stats = [](const std::vector<double>& v) {
        nlohmann::json s;
        if (v.empty()) return s;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        s["min"] = *lo;
        s["max"] = *hi;
        s["mean"] = sum / static_cast<double>(v.size());
        return s;
    };
    nlohmann::json doc;
    doc["version"] = ckpt.version;
    doc["inputs"] = ckpt.n_input;
    doc["neurons"] = ckpt.n_excitatory;
    doc["samples_seen"] = ckpt.samples_seen;
    doc["step_index"] = ckpt.state.step_index;
    doc["weights"] = stats(ckpt.state.weights);
    doc["theta"] = stats(ckpt.state.theta);
    doc["reception_sigma"] = stats(ckpt.state.reception_sigma);
    doc["config"] = nlohmann::json::parse(ckpt.config_json);
    return doc.dump(2);
}

}  // namespace spa::cli
