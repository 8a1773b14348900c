#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cwavegan/checkpoint.hpp"
#include "cwavegan/fidelity.hpp"
#include "cwavegan/run_config.hpp"

namespace cwavegan {

/// Exit status of a train run that hit a non-finite loss or gradient.
inline constexpr int kExitNonFinite = 3;

/// One loss-log record as written to `<out>/loss.log`, one JSON object per line.
std::string loss_log_line(std::uint64_t step, const LossReport& report);

struct TrainResult {
  int exit_code = 0;
  std::uint64_t last_step = 0;  // last step that completed (or failed)
  std::filesystem::path checkpoint;  // final or emergency checkpoint
  std::string message;
};

/// Trains `config.steps` generator iterations, appending one record per step
/// to the loss log and writing `ckpt-<step>.cwgn` every checkpoint_interval
/// steps and at the end. When `resume` is set the run continues from that
/// checkpoint; the loss log is cut back to the checkpoint step first so the
/// log stays one record per step. A non-finite loss or gradient writes
/// `emergency-<step>.cwgn` and returns kExitNonFinite.
TrainResult cmd_train(const RunConfig& config, const std::optional<Checkpoint>& resume = std::nullopt);

/// Waveforms from the generator for one label, z drawn from `rng`. Runs in
/// chunks of at most `chunk` items to bound memory.
std::vector<std::vector<float>> generate_waveforms(const GeneratorParams<float>& gen,
                                                   const ModelConfig& cfg, int label,
                                                   std::size_t count, Rng& rng,
                                                   std::size_t chunk = 32);

/// Writes `count` clips for `label` as `label<label>_<index>.wav` under
/// out_dir. Throws InputError for an out-of-range label.
std::vector<std::filesystem::path> cmd_generate(const Checkpoint& ckpt, int label, std::size_t count,
                                                std::uint64_t seed,
                                                const std::filesystem::path& out_dir);

/// Conditional fidelity of the checkpoint's generator against `corpus_spec`
/// ("synthetic" rebuilds the training corpus from the checkpoint's config).
FidelityReport cmd_eval(const Checkpoint& ckpt, const std::string& corpus_spec,
                        std::size_t n_per_class, std::uint64_t seed);

}  // namespace cwavegan
