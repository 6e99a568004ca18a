#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spa/network.hpp"

namespace spa {

enum class DatasetKind { Mnist, EmnistLetters };
enum class Split { Train, Test };

std::string_view to_string(DatasetKind kind) noexcept;
DatasetKind parse_dataset_kind(std::string_view name);

struct ImageSet {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t pixels_per_image() const noexcept { return rows * cols; }
    std::span<const std::uint8_t> image(std::size_t i) const {
        return std::span<const std::uint8_t>(pixels).subspan(i * pixels_per_image(), pixels_per_image());
    }
};

/// Reads a file, transparently inflating gzip.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Big-endian IDX image file: magic 0x00000803, N, rows, cols, then N·rows·cols bytes.
ImageSet parse_idx_images(std::span<const std::uint8_t> bytes);
ImageSet load_idx_images(const std::filesystem::path& path);

/// Big-endian IDX label file: magic 0x00000801, N, then N bytes.
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

/// Labeled images with labels mapped to 0..n_classes−1.
struct Dataset {
    DatasetKind kind = DatasetKind::Mnist;
    Split split = Split::Train;
    ImageSet images;
    std::vector<std::uint8_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t n_classes() const noexcept { return kind == DatasetKind::Mnist ? 10 : 26; }
    std::span<const std::uint8_t> image(std::size_t i) const { return images.image(i); }
};

/// Checks counts and label range, remaps EMNIST letters 1–26 to 0–25 and
/// transposes EMNIST images into MNIST orientation.
Dataset assemble_dataset(ImageSet images, std::vector<std::uint8_t> labels, DatasetKind kind, Split split);

/// Canonical file name inside a dataset directory (without ".gz").
std::string idx_file_name(DatasetKind kind, Split split, bool labels);

/// Loads a split from `dir`, accepting plain or ".gz" files.
Dataset load_dataset(const std::filesystem::path& dir, DatasetKind kind, Split split);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    int version = kCheckpointVersion;
    std::string config_json;  // serialized run configuration
    std::size_t n_input = 0;
    std::size_t n_excitatory = 0;
    std::uint64_t samples_seen = 0;
    NetworkState state;
    std::vector<int> assignments;  // per excitatory neuron, −1 = none

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Text header line "spa-checkpoint", a one-line JSON header, then the
/// declared arrays as little-endian IEEE-754 doubles in header order.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws a dimension error when the checkpoint was made for another network shape.
void check_compatible(const Checkpoint& ckpt, std::size_t n_input, std::size_t n_excitatory);

}  // namespace spa
