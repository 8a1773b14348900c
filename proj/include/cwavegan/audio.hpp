#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cwavegan/random.hpp"
#include "cwavegan/tensor.hpp"

namespace cwavegan {

inline constexpr std::uint32_t kDefaultSampleRate = 16000;
inline constexpr float kDefaultSilenceThreshold = 0.01f;

struct WavData {
  std::vector<float> samples;  // in [-1, 1)
  std::uint32_t sample_rate = 0;
};

/// Reads a RIFF/WAVE file holding 16-bit mono PCM. Samples are scaled by
/// 1/32768. Unknown chunks are skipped.
WavData load_wav(const std::filesystem::path& path);
WavData parse_wav(std::span<const std::uint8_t> bytes);

/// Writes 16-bit mono PCM. Values outside [-1, 1] are clipped; the return
/// value is the number of clipped samples.
std::size_t save_wav(std::span<const float> samples, std::uint32_t sample_rate,
                     const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(std::span<const float> samples, std::uint32_t sample_rate,
                                     std::size_t* clipped = nullptr);

struct NormalizedClip {
  std::vector<float> samples;
  bool all_silent = false;
};

/// Trims leading and trailing samples with |x| < threshold, then centre-crops
/// or zero-pads (extra sample at the end) to exactly `length`.
NormalizedClip normalize_length(std::span<const float> samples, std::size_t length,
                                float threshold = kDefaultSilenceThreshold);

struct AudioClip {
  std::vector<float> samples;
  int label = 0;
  std::string source;  // file path or synthetic descriptor
};

/// Labelled clips, ordered by label and then by source.
struct Corpus {
  std::vector<std::string> class_names;  // index == label
  std::vector<AudioClip> clips;
  std::size_t length = 0;
  std::size_t silent_clips = 0;  // clips that normalized to all zeros

  std::size_t num_classes() const { return class_names.size(); }
};

/// Loads `<root>/<class_name>/*.wav`. Class ids follow the lexicographic
/// order of the subdirectory names.
Corpus load_corpus(const std::filesystem::path& root, std::size_t length,
                   float threshold = kDefaultSilenceThreshold);

/// Class k is a sine of 220*(k+1) Hz at `sample_rate`, amplitude 0.8, random
/// phase.
Corpus synth_corpus(std::size_t num_classes, std::size_t per_class, std::size_t length, Rng& rng,
                    std::uint32_t sample_rate = kDefaultSampleRate);

/// Period in samples of synthetic class k.
double synth_period(std::size_t label, std::uint32_t sample_rate = kDefaultSampleRate);

struct Batch {
  Tensor<float> samples;  // (b, length, 1)
  std::vector<int> labels;
};

/// Epoch-shuffled mini-batches; the final short batch of an epoch is
/// dropped. The order of epoch e depends only on (seed, e), so the position
/// (epoch, cursor) is the whole iterator state.
class BatchIterator {
 public:
  BatchIterator(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed);

  Batch next();

  std::size_t batches_per_epoch() const noexcept { return batches_per_epoch_; }
  std::uint64_t epoch() const noexcept { return epoch_; }
  std::uint64_t cursor() const noexcept { return cursor_; }
  void seek(std::uint64_t epoch, std::uint64_t cursor);

  // Clip indices in the order epoch `epoch` visits them.
  std::vector<std::size_t> epoch_order(std::uint64_t epoch) const;

 private:
  const Corpus* corpus_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t batches_per_epoch_;
  std::uint64_t epoch_ = 0;
  std::uint64_t cursor_ = 0;
  std::vector<std::size_t> order_;
};

}  // namespace cwavegan
