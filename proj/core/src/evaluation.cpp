#include "spa/evaluation.hpp"

#include <algorithm>
#include <string>

#include "spa/error.hpp"

namespace spa {

SpikeTally::SpikeTally(std::size_t n_neurons, std::size_t n_classes)
    : n_neurons_(n_neurons), n_classes_(n_classes), totals_(n_neurons * n_classes, 0) {
    if (n_classes == 0) throw Error(ErrorKind::Domain, "tally needs at least one class");
}

void SpikeTally::add(std::span<const std::uint32_t> counts, std::size_t label) {
    if (counts.size() != n_neurons_) throw Error(ErrorKind::Dimension, "count vector does not match tally size");
    if (label >= n_classes_) throw Error(ErrorKind::Domain, "label out of range: " + std::to_string(label));
    for (std::size_t i = 0; i < n_neurons_; ++i) totals_[i * n_classes_ + label] += counts[i];
}

void SpikeTally::clear() { std::fill(totals_.begin(), totals_.end(), 0); }

std::vector<int> assign_labels(const SpikeTally& tally) {
    std::vector<int> out(tally.n_neurons(), kNoLabel);
    for (std::size_t i = 0; i < tally.n_neurons(); ++i) {
        std::uint64_t best = 0;
        for (std::size_t c = 0; c < tally.n_classes(); ++c) {
            if (tally.at(i, c) > best) {
                best = tally.at(i, c);
                out[i] = static_cast<int>(c);
            }
        }
    }
    return out;
}

Prediction classify(std::span<const std::uint32_t> counts, std::span<const int> assignments, std::size_t n_classes) {
    if (counts.size() != assignments.size()) throw Error(ErrorKind::Dimension, "counts and assignments differ in size");
    std::vector<double> sum(n_classes, 0.0);
    std::vector<std::size_t> members(n_classes, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const int a = assignments[i];
        if (a == kNoLabel) continue;
        if (a < 0 || static_cast<std::size_t>(a) >= n_classes) throw Error(ErrorKind::Domain, "assignment out of range");
        sum[static_cast<std::size_t>(a)] += counts[i];
        ++members[static_cast<std::size_t>(a)];
    }
    Prediction p;
    double best = 0.0;
    bool any = false;
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (members[c] == 0) continue;
        const double mean = sum[c] / static_cast<double>(members[c]);
        if (mean > best) {
            best = mean;
            p.label = static_cast<int>(c);
            any = true;
        }
    }
    if (!any) {
        p.fallback = true;
        p.label = static_cast<int>(std::max_element(members.begin(), members.end()) - members.begin());
    }
    return p;
}

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes) : n_(n_classes), cells_(n_classes * n_classes, 0) {}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
    if (truth >= n_ || predicted >= n_) throw Error(ErrorKind::Domain, "class out of range");
    ++cells_[truth * n_ + predicted];
    ++total_;
}

std::uint64_t ConfusionMatrix::correct() const noexcept {
    std::uint64_t c = 0;
    for (std::size_t k = 0; k < n_; ++k) c += cells_[k * n_ + k];
    return c;
}

double ConfusionMatrix::accuracy() const noexcept {
    return total_ == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(total_);
}

}  // namespace spa
