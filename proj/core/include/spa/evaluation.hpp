#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spa {

inline constexpr int kNoLabel = -1;

/// Per-neuron, per-class spike totals over a labeled stream.
class SpikeTally {
public:
    SpikeTally(std::size_t n_neurons, std::size_t n_classes);

    void add(std::span<const std::uint32_t> counts, std::size_t label);
    void clear();

    std::size_t n_neurons() const noexcept { return n_neurons_; }
    std::size_t n_classes() const noexcept { return n_classes_; }
    std::uint64_t at(std::size_t neuron, std::size_t label) const { return totals_[neuron * n_classes_ + label]; }

private:
    std::size_t n_neurons_;
    std::size_t n_classes_;
    std::vector<std::uint64_t> totals_;
};

/// Argmax class per neuron, ties to the lowest index; silent neurons get kNoLabel.
std::vector<int> assign_labels(const SpikeTally& tally);

struct Prediction {
    int label = 0;
    bool fallback = false;  // every class was silent
};

/// Mean count per assigned class, argmax with ties to the lowest index. When
/// every class is silent, predicts the class holding the most neurons.
Prediction classify(std::span<const std::uint32_t> counts, std::span<const int> assignments, std::size_t n_classes);

class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t n_classes);

    void add(std::size_t truth, std::size_t predicted);
    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return cells_[truth * n_ + predicted]; }
    std::size_t n_classes() const noexcept { return n_; }
    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t correct() const noexcept;
    double accuracy() const noexcept;

private:
    std::size_t n_;
    std::vector<std::uint64_t> cells_;
    std::uint64_t total_ = 0;
};

}  // namespace spa
