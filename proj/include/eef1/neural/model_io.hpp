#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eef1/neural/network.hpp"

namespace eef1::neural {

// Model file layout (all integers and floats little-endian):
//   "EEF1" magic, u32 version,
//   u32 series, u32 convs_per_series, u32 hidden_channels, u32 kernel,
//   f64 temperature, f64 lambda,
//   f64 beta1, f64 beta2, f64 epsilon, f64 learning_rate,
//   u32 layer_count, then per layer:
//     u8 kind, u32 out_channels, u32 in_channels, u32 k,
//     f32[co*ci*k*k] weights, f32[co] biases
//   u32 CRC-32 of everything above.

inline constexpr std::uint32_t kModelVersion = 1;

struct ModelIoError : std::runtime_error {
    enum class Kind { Io, BadMagic, BadVersion, BadChecksum, BadStructure };
    Kind kind;
    ModelIoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

namespace detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

struct ByteWriter {
    std::vector<std::uint8_t> bytes;

    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
};

struct ByteReader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool has(std::size_t k) const { return pos + k <= bytes.size(); }
    void need(std::size_t k) const {
        if (pos + k > bytes.size()) throw ModelIoError(ModelIoError::Kind::BadChecksum, "model file truncated");
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

}  // namespace detail

struct TrainingMeta {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 0.001;
};

inline void save_model(const NetworkParams& params, const std::string& path, const TrainingMeta& meta = {}) {
    detail::ByteWriter w;
    w.bytes.insert(w.bytes.end(), {'E', 'E', 'F', '1'});
    w.u32(kModelVersion);
    w.u32(static_cast<std::uint32_t>(params.arch.series));
    w.u32(static_cast<std::uint32_t>(params.arch.convs_per_series));
    w.u32(static_cast<std::uint32_t>(params.arch.hidden_channels));
    w.u32(static_cast<std::uint32_t>(params.arch.kernel));
    w.f64(params.arch.temperature);
    w.f64(params.lambda);
    w.f64(meta.beta1);
    w.f64(meta.beta2);
    w.f64(meta.epsilon);
    w.f64(meta.learning_rate);
    w.u32(static_cast<std::uint32_t>(params.layers.size()));
    for (const auto& layer : params.layers) {
        w.u8(static_cast<std::uint8_t>(layer.kind));
        w.u32(static_cast<std::uint32_t>(layer.w.out_channels));
        w.u32(static_cast<std::uint32_t>(layer.w.in_channels));
        w.u32(static_cast<std::uint32_t>(layer.w.k));
        for (float v : layer.w.data) w.f32(v);
        for (float v : layer.bias) w.f32(v);
    }
    w.u32(detail::crc32(w.bytes.data(), w.bytes.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelIoError(ModelIoError::Kind::Io, "cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw ModelIoError(ModelIoError::Kind::Io, "write failed: " + path);
}

inline NetworkParams load_model(const std::string& path, TrainingMeta* meta_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError(ModelIoError::Kind::Io, "cannot open for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 8) throw ModelIoError(ModelIoError::Kind::BadChecksum, "model file truncated");
    if (bytes[0] != 'E' || bytes[1] != 'E' || bytes[2] != 'F' || bytes[3] != '1')
        throw ModelIoError(ModelIoError::Kind::BadMagic, "not a model file (bad magic)");

    detail::ByteReader header{bytes, 4};
    const std::uint32_t version = header.u32();
    if (version != kModelVersion)
        throw ModelIoError(ModelIoError::Kind::BadVersion, "unsupported model version " + std::to_string(version));

    const std::uint32_t stored_crc = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24;
    if (detail::crc32(bytes.data(), bytes.size() - 4) != stored_crc)
        throw ModelIoError(ModelIoError::Kind::BadChecksum, "model checksum mismatch");

    detail::ByteReader r{bytes, 8};
    NetworkParams params;
    params.arch.series = static_cast<int>(r.u32());
    params.arch.convs_per_series = static_cast<int>(r.u32());
    params.arch.hidden_channels = static_cast<int>(r.u32());
    params.arch.kernel = static_cast<int>(r.u32());
    params.arch.temperature = r.f64();
    params.lambda = r.f64();
    TrainingMeta meta;
    meta.beta1 = r.f64();
    meta.beta2 = r.f64();
    meta.epsilon = r.f64();
    meta.learning_rate = r.f64();
    if (meta_out) *meta_out = meta;

    const std::uint32_t layer_count = r.u32();
    const std::vector<LayerShape> plan = layer_plan(params.arch);
    if (layer_count != plan.size())
        throw ModelIoError(ModelIoError::Kind::BadStructure, "layer count does not match architecture");
    for (const LayerShape& shape : plan) {
        LayerParams<float> layer;
        const auto kind = static_cast<LayerKind>(r.u8());
        const int co = static_cast<int>(r.u32());
        const int ci = static_cast<int>(r.u32());
        const int k = static_cast<int>(r.u32());
        if (kind != shape.kind || co != shape.out_channels || ci != shape.in_channels || k != shape.k)
            throw ModelIoError(ModelIoError::Kind::BadStructure, "layer shape does not match architecture");
        layer.kind = kind;
        layer.w = Kernel<float>(co, ci, k);
        for (float& v : layer.w.data) v = r.f32();
        layer.bias.resize(co);
        for (float& v : layer.bias) v = r.f32();
        params.layers.push_back(std::move(layer));
    }
    if (r.pos != bytes.size() - 4)
        throw ModelIoError(ModelIoError::Kind::BadStructure, "trailing bytes in model file");
    return params;
}

}  // namespace eef1::neural
