#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spa/cli/run_config.hpp"
#include "spa/dataio.hpp"
#include "spa/evaluation.hpp"
#include "spa/forecast.hpp"
#include "spa/network.hpp"

namespace spa::cli {

struct TrainSummary {
    std::size_t samples = 0;
    double online_accuracy = 0.0;
    std::uint64_t total_spikes = 0;
    std::size_t low_activity = 0;
    double wall_ms_per_sample = 0.0;
    std::vector<std::uint64_t> spikes_per_sample;
    std::vector<double> wall_ms;
};

struct EvalReport {
    double accuracy = 0.0;
    double train_accuracy = 0.0;  // assignment stream re-classified with the final assignments
    ConfusionMatrix confusion{1};
    std::size_t fallbacks = 0;
    std::size_t low_activity = 0;
    std::size_t assign_samples = 0;
    std::size_t test_samples = 0;
    std::vector<int> assignments;
    std::vector<std::uint64_t> spikes_per_sample;  // test split
};

struct ForecastRecord {
    std::uint64_t sample_index = 0;
    BoundReport report;
};

struct ForecastSkip {
    std::uint64_t sample_index = 0;
    std::string observable;
    std::string reason;
};

struct ForecastSummary {
    std::vector<ForecastRecord> records;
    std::vector<ForecastSkip> skipped;
};

inline const std::vector<double> kForecastHorizonsMs = {1.0, 5.0, 10.0};

/// Training-stream positions whose samples are re-presented for label assignment.
std::vector<std::size_t> assignment_indices(const RunConfig& config, std::size_t train_size);

/// Checkpoint of a network together with the run configuration.
Checkpoint make_checkpoint(const RunConfig& config, const Network& net, std::uint64_t samples_seen,
                           std::vector<int> assignments);

/// Network rebuilt from `config` and the checkpointed state.
Network restore_network(const RunConfig& config, const Checkpoint& ckpt);

TrainSummary train_on(const RunConfig& config, const Dataset& train, std::ostream& log);
EvalReport evaluate_on(const RunConfig& config, const Checkpoint& ckpt, const Dataset& train, const Dataset& test,
                       std::ostream& log);

TrainSummary cmd_train(const RunConfig& config, std::ostream& log);
EvalReport cmd_eval(const RunConfig& config, std::ostream& log);
ForecastSummary cmd_forecast(const std::filesystem::path& traces, const std::filesystem::path& out,
                             std::ostream& log);
std::string cmd_inspect(const std::filesystem::path& checkpoint);

}  // namespace spa::cli
