#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cwavegan/audio.hpp"
#include "cwavegan/model.hpp"
#include "cwavegan/trainer.hpp"

namespace cwavegan {

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "CWAVEGAN_OUT";

/// Complete description of a training run. Serialized as flat `key=value`
/// lines whose keys match the CLI flags (`--batch-size` <-> `batch-size`).
struct RunConfig {
  ModelConfig model;
  std::optional<double> lr_g;  // defaults follow the loss mode
  std::optional<double> lr_d;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double gp_lambda = kDefaultGradientPenaltyWeight;
  std::size_t d_updates = 5;
  std::size_t batch_size = 64;
  std::uint64_t steps = 1000;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_interval = 0;  // 0: final checkpoint only
  std::string corpus = "synthetic";       // "synthetic" or a corpus root directory
  std::size_t synth_per_class = 16;
  std::uint32_t sample_rate = kDefaultSampleRate;
  float silence_threshold = kDefaultSilenceThreshold;
  std::string out;  // empty: $CWAVEGAN_OUT, else ./runs

  static const std::vector<std::string>& keys();

  /// Throws ConfigError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  void validate() const;
  TrainSettings train_settings() const;
  std::filesystem::path output_dir() const;
};

/// Corpus named by the config; the synthetic corpus is derived from `seed`.
Corpus make_corpus(const RunConfig& config);

}  // namespace cwavegan
