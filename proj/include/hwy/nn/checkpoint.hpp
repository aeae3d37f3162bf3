#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hwy/nn/network.hpp"

namespace hwy::nn {

// Binary checkpoint, all integers and reals little-endian:
//   "HWYQNET\0"  magic (8 bytes)
//   u32 version (1), u32 head, u32 activation, u32 input_dim, u32 output_dim, u32 layer_count
//   per layer: u32 kind, u32 in, u32 out, u32 noise_enabled, u64 value_count, f64[value_count]
//     dense: weight (row-major), bias
//     noisy: mu_w (row-major), mu_b, sigma_w (row-major), sigma_b, eps_in, eps_out
//   u64 FNV-1a checksum of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public Error {
public:
    using Error::Error;
};

std::vector<std::uint8_t> checkpoint_bytes(const Network& net);
Network network_from_bytes(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace hwy::nn
