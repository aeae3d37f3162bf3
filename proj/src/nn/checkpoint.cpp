#include "hwy/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hwy::nn {
namespace {

constexpr char kMagic[8] = {'H', 'W', 'Y', 'Q', 'N', 'E', 'T', '\0'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out.insert(out.end(), b, b + n);
    }
    void row_major(const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
        }
    }
    void vec(const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
    }
    std::vector<std::uint8_t> out;

private:
    void put(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t n) : data_(data), n_(n) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, data_ + pos_, n);
        pos_ += n;
    }
    void row_major(Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
        }
    }
    void vec(Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
    }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > n_) throw CheckpointError("checkpoint truncated");
    }
    std::uint64_t get(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    const std::uint8_t* data_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

std::uint64_t value_count(const Layer& l) {
    const auto w = static_cast<std::uint64_t>(l.weight.size());
    const auto b = static_cast<std::uint64_t>(l.bias.size());
    if (!l.noisy()) return w + b;
    return 2 * (w + b) + static_cast<std::uint64_t>(l.in() + l.out());
}

}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const Network& net) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(net.head()));
    w.u32(static_cast<std::uint32_t>(net.activation()));
    w.u32(static_cast<std::uint32_t>(net.input_dim()));
    w.u32(static_cast<std::uint32_t>(net.output_dim()));
    w.u32(static_cast<std::uint32_t>(net.layers().size()));
    for (const auto& l : net.layers()) {
        w.u32(static_cast<std::uint32_t>(l.kind()));
        w.u32(static_cast<std::uint32_t>(l.in()));
        w.u32(static_cast<std::uint32_t>(l.out()));
        w.u32(l.noise_enabled ? 1U : 0U);
        w.u64(value_count(l));
        w.row_major(l.weight);
        w.vec(l.bias);
        if (l.noisy()) {
            w.row_major(l.sigma_w);
            w.vec(l.sigma_b);
            w.vec(l.eps_in);
            w.vec(l.eps_out);
        }
    }
    w.u64(fnv1a(w.out.data(), w.out.size()));
    return std::move(w.out);
}

Network network_from_bytes(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < sizeof kMagic + 8) throw CheckpointError("checkpoint truncated");
    const std::size_t body = bytes.size() - 8;
    Reader tail(bytes.data() + body, 8);
    if (tail.u64() != fnv1a(bytes.data(), body)) throw CheckpointError("checkpoint checksum mismatch");

    Reader r(bytes.data(), body);
    char magic[8];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CheckpointError("not a network checkpoint");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto head = r.u32();
    const auto activation = r.u32();
    const auto input_dim = r.u32();
    const auto output_dim = r.u32();
    const auto layer_count = r.u32();
    if (head > 1 || activation > 1) throw CheckpointError("bad head or activation code");
    if (layer_count == 0 || layer_count > 64) throw CheckpointError("bad layer count");

    std::vector<Layer> layers;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        const auto kind = r.u32();
        const auto in = r.u32();
        const auto out = r.u32();
        const auto noise_enabled = r.u32();
        const auto count = r.u64();
        if (kind > 1 || in == 0 || out == 0 || in > (1U << 20) || out > (1U << 20)) {
            throw CheckpointError("bad layer record " + std::to_string(i));
        }
        Layer l(static_cast<LayerKind>(kind), static_cast<int>(in), static_cast<int>(out));
        if (count != value_count(l)) throw CheckpointError("layer " + std::to_string(i) + " has wrong value count");
        l.noise_enabled = noise_enabled != 0;
        r.row_major(l.weight);
        r.vec(l.bias);
        if (l.noisy()) {
            r.row_major(l.sigma_w);
            r.vec(l.sigma_b);
            r.vec(l.eps_in);
            r.vec(l.eps_out);
        }
        layers.push_back(std::move(l));
    }
    if (r.pos() != body) throw CheckpointError("trailing bytes in checkpoint");
    Network net(static_cast<HeadKind>(head), static_cast<Activation>(activation), std::move(layers));
    if (static_cast<std::uint32_t>(net.input_dim()) != input_dim ||
        static_cast<std::uint32_t>(net.output_dim()) != output_dim) {
        throw CheckpointError("checkpoint header dimensions disagree with layers");
    }
    return net;
}

void save_checkpoint(const Network& net, const std::filesystem::path& path) {
    const auto bytes = checkpoint_bytes(net);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("failed writing " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return network_from_bytes(bytes);
}

}  // namespace hwy::nn
