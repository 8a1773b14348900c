#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cwavegan/run_config.hpp"
#include "cwavegan/trainer.hpp"

namespace cwavegan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian layout:
///   "CWGN" | u32 version | u64 len + config text | u64 step, gen t, disc t,
///   data epoch, data cursor | u64 len + rng state | u64 tensor count |
///   per tensor: u32 len + name, u32 rank, u64 dims[rank], f32 values.
struct Checkpoint {
  RunConfig config;
  TrainState state;
  std::uint64_t data_epoch = 0;
  std::uint64_t data_cursor = 0;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);

/// Rebuilds the model from the stored config and fills every tensor. Throws
/// ParseError for truncated or malformed bytes, FormatError for a bad magic,
/// version, or a tensor whose name or shape does not match the model.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cwavegan
