#include "cwavegan/random.hpp"

#include <limits>
#include <sstream>

namespace cwavegan {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

float Rng::uniform01f() { return static_cast<float>(engine_() >> 40) * 0x1.0p-24f; }

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InputError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (is.fail()) throw ConfigError("malformed RNG state");
}

template <typename T>
Tensor<T> sample_uniform(const Shape& shape, Rng& rng) {
  Tensor<T> out(shape);
  for (T& v : out.mutable_values()) {
    if constexpr (std::numeric_limits<T>::digits <= 24) {
      v = T(-1) + T(2) * static_cast<T>(rng.uniform01f());
    } else {
      v = T(-1) + T(2) * static_cast<T>(rng.uniform01());
    }
  }
  return out;
}

template Tensor<float> sample_uniform<float>(const Shape&, Rng&);
template Tensor<double> sample_uniform<double>(const Shape&, Rng&);

}  // namespace cwavegan
