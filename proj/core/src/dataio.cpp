#include "spa/dataio.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "spa/error.hpp"

namespace spa {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr std::string_view kCheckpointMagic = "spa-checkpoint";

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) | (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) | static_cast<std::uint32_t>(bytes[offset + 3]);
}

void append_le64(std::string& out, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

double read_le64(const char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
    return std::bit_cast<double>(bits);
}

std::filesystem::path find_idx(const std::filesystem::path& dir, const std::string& name) {
    const auto plain = dir / name;
    if (std::filesystem::exists(plain)) return plain;
    const auto gz = dir / (name + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw Error(ErrorKind::Io, "dataset file not found: " + plain.string());
}

}  // namespace

std::string_view to_string(DatasetKind kind) noexcept {
    return kind == DatasetKind::Mnist ? "mnist" : "emnist-letters";
}

DatasetKind parse_dataset_kind(std::string_view name) {
    if (name == "mnist") return DatasetKind::Mnist;
    if (name == "emnist-letters") return DatasetKind::EmnistLetters;
    throw Error(ErrorKind::Config, "unknown dataset: " + std::string(name));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "file not found: " + path.string());
    gzFile file = gzopen(path.string().c_str(), "rb");
    if (file == nullptr) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> buffer{};
    for (;;) {
        const int n = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()));
        if (n < 0) {
            gzclose(file);
            throw Error(ErrorKind::Io, "read error in " + path.string());
        }
        if (n == 0) break;
        out.insert(out.end(), buffer.begin(), buffer.begin() + n);
    }
    gzclose(file);
    return out;
}

ImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || read_be32(bytes, 0) != kImageMagic) throw Error(ErrorKind::Format, "not an IDX image file");
    if (bytes.size() < 16) throw Error(ErrorKind::Format, "truncated file");
    ImageSet set;
    set.count = read_be32(bytes, 4);
    set.rows = read_be32(bytes, 8);
    set.cols = read_be32(bytes, 12);
    const std::size_t payload = set.count * set.rows * set.cols;
    if (bytes.size() - 16 < payload) throw Error(ErrorKind::Format, "truncated file");
    set.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
    return set;
}

ImageSet load_idx_images(const std::filesystem::path& path) { return parse_idx_images(read_file_bytes(path)); }

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || read_be32(bytes, 0) != kLabelMagic) throw Error(ErrorKind::Format, "not an IDX label file");
    if (bytes.size() < 8) throw Error(ErrorKind::Format, "truncated file");
    const std::size_t n = read_be32(bytes, 4);
    if (bytes.size() - 8 < n) throw Error(ErrorKind::Format, "truncated file");
    return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
    return parse_idx_labels(read_file_bytes(path));
}

Dataset assemble_dataset(ImageSet images, std::vector<std::uint8_t> labels, DatasetKind kind, Split split) {
    if (images.count != labels.size()) {
        throw Error(ErrorKind::Dimension, "image count " + std::to_string(images.count) + " does not match label count " +
                                              std::to_string(labels.size()));
    }
    if (kind == DatasetKind::Mnist) {
        for (auto l : labels) {
            if (l > 9) throw Error(ErrorKind::Domain, "label out of range: " + std::to_string(l));
        }
    } else {
        for (auto& l : labels) {
            if (l < 1 || l > 26) throw Error(ErrorKind::Domain, "label out of range: " + std::to_string(l));
            l = static_cast<std::uint8_t>(l - 1);
        }
        if (images.rows != images.cols) throw Error(ErrorKind::Format, "EMNIST images must be square");
        const std::size_t side = images.rows;
        std::vector<std::uint8_t> transposed(images.pixels.size());
        for (std::size_t i = 0; i < images.count; ++i) {
            const std::size_t base = i * side * side;
            for (std::size_t r = 0; r < side; ++r) {
                for (std::size_t c = 0; c < side; ++c) transposed[base + r * side + c] = images.pixels[base + c * side + r];
            }
        }
        images.pixels = std::move(transposed);
    }
    return Dataset{kind, split, std::move(images), std::move(labels)};
}

std::string idx_file_name(DatasetKind kind, Split split, bool labels) {
    const char* kind_part = labels ? "labels-idx1-ubyte" : "images-idx3-ubyte";
    if (kind == DatasetKind::Mnist) {
        return std::string(split == Split::Train ? "train-" : "t10k-") + kind_part;
    }
    return std::string("emnist-letters-") + (split == Split::Train ? "train-" : "test-") + kind_part;
}

Dataset load_dataset(const std::filesystem::path& dir, DatasetKind kind, Split split) {
    auto images = load_idx_images(find_idx(dir, idx_file_name(kind, split, false)));
    auto labels = load_idx_labels(find_idx(dir, idx_file_name(kind, split, true)));
    return assemble_dataset(std::move(images), std::move(labels), kind, split);
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const NetworkState& s = ckpt.state;
    std::vector<double> assignments(ckpt.assignments.begin(), ckpt.assignments.end());
    const std::vector<std::pair<std::string, const std::vector<double>*>> arrays = {
        {"weights", &s.weights},
        {"theta", &s.theta},
        {"v_res", &s.v_res},
        {"reception_mean", &s.reception_mean},
        {"reception_sigma", &s.reception_sigma},
        {"reception_value", &s.reception_value},
        {"ledger", &s.ledger},
        {"assignments", &assignments},
    };

    nlohmann::json header;
    header["version"] = ckpt.version;
    header["config"] = ckpt.config_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(ckpt.config_json);
    header["dims"] = {{"inputs", ckpt.n_input}, {"excitatory", ckpt.n_excitatory}};
    header["samples_seen"] = ckpt.samples_seen;
    header["step_index"] = s.step_index;
    header["rng"] = {{"input", s.input_rng}, {"spa", s.spa_rng}};
    auto& list = header["arrays"] = nlohmann::json::array();
    for (const auto& [name, values] : arrays) list.push_back({{"name", name}, {"count", values->size()}});

    std::string out;
    out.append(kCheckpointMagic).push_back('\n');
    out.append(header.dump()).push_back('\n');
    for (const auto& [name, values] : arrays) {
        for (double v : *values) append_le64(out, v);
    }

    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        file.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!file) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot open checkpoint " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    const auto magic_end = bytes.find('\n');
    if (magic_end == std::string::npos || std::string_view(bytes).substr(0, magic_end) != kCheckpointMagic) {
        throw Error(ErrorKind::Format, "not a checkpoint file");
    }
    const auto header_end = bytes.find('\n', magic_end + 1);
    if (header_end == std::string::npos) throw Error(ErrorKind::Format, "corrupt checkpoint header");

    Checkpoint ckpt;
    std::size_t offset = header_end + 1;
    try {
        const auto header = nlohmann::json::parse(bytes.substr(magic_end + 1, header_end - magic_end - 1));
        ckpt.version = header.at("version").get<int>();
        if (ckpt.version != kCheckpointVersion) {
            throw Error(ErrorKind::Format, "unsupported checkpoint version " + std::to_string(ckpt.version));
        }
        ckpt.config_json = header.at("config").dump();
        ckpt.n_input = header.at("dims").at("inputs").get<std::size_t>();
        ckpt.n_excitatory = header.at("dims").at("excitatory").get<std::size_t>();
        ckpt.samples_seen = header.at("samples_seen").get<std::uint64_t>();
        ckpt.state.step_index = header.at("step_index").get<std::uint64_t>();
        ckpt.state.input_rng = header.at("rng").at("input").get<std::string>();
        ckpt.state.spa_rng = header.at("rng").at("spa").get<std::string>();

        std::vector<double> assignments;
        const std::vector<std::pair<std::string, std::vector<double>*>> targets = {
            {"weights", &ckpt.state.weights},
            {"theta", &ckpt.state.theta},
            {"v_res", &ckpt.state.v_res},
            {"reception_mean", &ckpt.state.reception_mean},
            {"reception_sigma", &ckpt.state.reception_sigma},
            {"reception_value", &ckpt.state.reception_value},
            {"ledger", &ckpt.state.ledger},
            {"assignments", &assignments},
        };
        const auto& list = header.at("arrays");
        if (list.size() != targets.size()) throw Error(ErrorKind::Format, "corrupt checkpoint header");
        for (std::size_t a = 0; a < targets.size(); ++a) {
            if (list[a].at("name").get<std::string>() != targets[a].first) {
                throw Error(ErrorKind::Format, "corrupt checkpoint header");
            }
            const auto count = list[a].at("count").get<std::size_t>();
            if ((bytes.size() - offset) / 8 < count) throw Error(ErrorKind::Format, "truncated file");
            auto& dest = *targets[a].second;
            dest.resize(count);
            for (std::size_t i = 0; i < count; ++i, offset += 8) dest[i] = read_le64(bytes.data() + offset);
        }
        ckpt.assignments.reserve(assignments.size());
        for (double a : assignments) ckpt.assignments.push_back(static_cast<int>(a));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("corrupt checkpoint header: ") + e.what());
    }
    if (offset != bytes.size()) throw Error(ErrorKind::Format, "trailing bytes in checkpoint");

    const std::size_t n = ckpt.n_excitatory;
    if (ckpt.state.weights.size() != ckpt.n_input * n || ckpt.state.theta.size() != n ||
        ckpt.state.v_res.size() != 2 * n || ckpt.state.reception_mean.size() != 2 * n ||
        ckpt.state.reception_sigma.size() != 2 * n || ckpt.state.reception_value.size() != 2 * n ||
        ckpt.state.ledger.size() != 10 * n ||
        (!ckpt.assignments.empty() && ckpt.assignments.size() != n)) {
        throw Error(ErrorKind::Format, "checkpoint arrays do not match declared dimensions");
    }
    return ckpt;
}

void check_compatible(const Checkpoint& ckpt, std::size_t n_input, std::size_t n_excitatory) {
    if (ckpt.n_input != n_input || ckpt.n_excitatory != n_excitatory) {
        throw Error(ErrorKind::Dimension, "checkpoint has " + std::to_string(ckpt.n_input) + "x" +
                                              std::to_string(ckpt.n_excitatory) + " input weights, config expects " +
                                              std::to_string(n_input) + "x" + std::to_string(n_excitatory));
    }
}

}  // namespace spa
