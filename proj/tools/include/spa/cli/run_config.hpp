#pragma once

#include <filesystem>
#include <string>

#include "spa/dataio.hpp"
#include "spa/network.hpp"

namespace spa::cli {

struct RunConfig {
    NetworkConfig network;
    DatasetKind dataset = DatasetKind::Mnist;
    std::filesystem::path dataset_dir = "data/mnist";
    std::size_t samples = 10000;          // training samples per pass
    std::size_t passes = 1;
    std::size_t assign_samples = 10000;   // training-stream tail used for label assignment
    std::size_t test_samples = 0;         // 0 = whole test split
    std::size_t ckpt_every = 0;           // 0 = only at the end
    std::filesystem::path checkpoint = "spa.ckpt";
    std::filesystem::path metrics_out;    // empty = no metrics file
    std::filesystem::path report_out;     // empty = no eval report file
    std::filesystem::path traces_out;     // empty = no observable traces
    std::size_t trace_every = 100;        // record traces for every n-th training sample
    std::size_t accuracy_window = 1000;   // samples feeding the online label assignment
    std::size_t assign_every = 250;       // online assignment refresh period
};

/// Applies the keys of a flat JSON object; unknown keys and wrong types are config errors.
void apply_json(RunConfig& config, const std::string& json_text);

/// Reads and applies a config file.
void apply_file(RunConfig& config, const std::filesystem::path& path);

/// Checks ranges and consistency; throws a config error on the first violation.
void validate(const RunConfig& config);

/// Every key with its current value, as a compact JSON object.
std::string to_json(const RunConfig& config);

}  // namespace spa::cli
