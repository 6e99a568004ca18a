#include <CLI11.hpp>
#include <iostream>

#include "spa/cli/commands.hpp"
#include "spa/error.hpp"

namespace {

struct Flags {
    std::string config;
    std::string dataset;
    std::string dataset_dir;
    std::string spa;
    std::string checkpoint;
    std::string metrics_out;
    std::string record_traces;
    std::string report_out;
    std::size_t neurons = 0;
    std::size_t samples = 0;
    std::size_t passes = 0;
    std::size_t ckpt_every = 0;
    std::size_t test_samples = 0;
    std::size_t assign_samples = 0;
    std::uint64_t seed = 0;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--dataset", f.dataset, "mnist | emnist-letters")->check(CLI::IsMember({"mnist", "emnist-letters"}));
    cmd->add_option("--dataset-dir", f.dataset_dir, "Directory with the IDX files");
    cmd->add_option("--neurons", f.neurons, "Excitatory population size");
    cmd->add_option("--samples", f.samples, "Training samples per pass");
    cmd->add_option("--seed", f.seed, "Seed for every random stream");
    cmd->add_option("--spa", f.spa, "Stochastic probability adjustment on|off")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint path");
}

spa::cli::RunConfig build_config(const CLI::App* cmd, const Flags& f) {
    spa::cli::RunConfig c;
    if (!f.config.empty()) spa::cli::apply_file(c, f.config);
    auto given = [cmd](const char* name) {
        const auto* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--dataset")) c.dataset = spa::parse_dataset_kind(f.dataset);
    if (given("--dataset-dir")) c.dataset_dir = f.dataset_dir;
    if (given("--neurons")) c.network.n_excitatory = f.neurons;
    if (given("--samples")) c.samples = f.samples;
    if (given("--passes")) c.passes = f.passes;
    if (given("--seed")) c.network.seed = f.seed;
    if (given("--spa")) c.network.spa_enabled = f.spa == "on";
    if (given("--checkpoint")) c.checkpoint = f.checkpoint;
    if (given("--ckpt-every")) c.ckpt_every = f.ckpt_every;
    if (given("--metrics-out")) c.metrics_out = f.metrics_out;
    if (given("--record-traces")) c.traces_out = f.record_traces;
    if (given("--report-out")) c.report_out = f.report_out;
    if (given("--test-samples")) c.test_samples = f.test_samples;
    if (given("--assign-samples")) c.assign_samples = f.assign_samples;
    spa::cli::validate(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiking network with stochastic transmitter reception"};
    app.require_subcommand(1);
    Flags f;

    auto* train = app.add_subcommand("train", "Train on the training split and write a checkpoint");
    add_run_flags(train, f);
    train->add_option("--passes", f.passes, "Passes over the training samples");
    train->add_option("--ckpt-every", f.ckpt_every, "Checkpoint period in samples");
    train->add_option("--metrics-out", f.metrics_out, "Per-sample metrics CSV");
    train->add_option("--record-traces", f.record_traces, "CSV of observable traces for forecasting");

    auto* eval = app.add_subcommand("eval", "Assign labels and classify the test split");
    add_run_flags(eval, f);
    eval->add_option("--report-out", f.report_out, "JSON report path (a confusion CSV is written next to it)");
    eval->add_option("--test-samples", f.test_samples, "Test samples to classify (0 = all)");
    eval->add_option("--assign-samples", f.assign_samples, "Training-stream tail used for label assignment");

    auto* forecast = app.add_subcommand("forecast", "Fit OU models to recorded traces and check forecast error");
    std::string forecast_ckpt;
    forecast->add_option("--checkpoint", forecast_ckpt, "Checkpoint of the run that recorded the traces")
        ->check(CLI::ExistingFile);
    forecast->add_option("--record-traces", f.record_traces, "Trace CSV written by train")->required();
    forecast->add_option("--metrics-out", f.metrics_out, "Diagnostic CSV path")->required();

    auto* inspect = app.add_subcommand("inspect", "Summarize a checkpoint");
    inspect->add_option("--checkpoint", f.checkpoint, "Checkpoint path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const auto summary = spa::cli::cmd_train(build_config(train, f), std::cerr);
            std::cout << "samples=" << summary.samples << " online_accuracy=" << summary.online_accuracy
                      << " spikes=" << summary.total_spikes << " low_activity=" << summary.low_activity
                      << " ms_per_sample=" << summary.wall_ms_per_sample << '\n';
        } else if (*eval) {
            const auto report = spa::cli::cmd_eval(build_config(eval, f), std::cerr);
            std::cout << "accuracy=" << report.accuracy << " train_accuracy=" << report.train_accuracy
                      << " test_samples=" << report.test_samples << " fallbacks=" << report.fallbacks << '\n';
        } else if (*forecast) {
            if (!forecast_ckpt.empty()) spa::load_checkpoint(forecast_ckpt);
            const auto summary = spa::cli::cmd_forecast(f.record_traces, f.metrics_out, std::cerr);
            std::size_t passed = 0;
            for (const auto& r : summary.records) passed += r.report.pass;
            std::cout << "records=" << summary.records.size() << " passed=" << passed
                      << " skipped=" << summary.skipped.size() << '\n';
        } else if (*inspect) {
            std::cout << spa::cli::cmd_inspect(f.checkpoint) << '\n';
        }
    } catch (const spa::Error& e) {
        std::cerr << "error[" << spa::to_string(e.kind()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
