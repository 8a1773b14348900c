#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "cwavegan/tensor.hpp"

namespace cwavegan {

/// Seeded generator with a serializable state. Draws are built directly from
/// engine bits so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}
  // Seeds from several words, e.g. (seed, epoch).
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform01();
  // [0, 1) with 24 random bits; exactly representable as float.
  float uniform01f();
  // Uniform integer in [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::string state() const;
  void restore(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// I.i.d. Uniform[-1, 1) values.
template <typename T>
Tensor<T> sample_uniform(const Shape& shape, Rng& rng);

}  // namespace cwavegan
