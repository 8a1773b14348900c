#include "cwavegan/commands.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cwavegan {

namespace {

// Keys that may differ between a checkpoint and the config resuming it.
bool resumable_key(const std::string& key) {
  return key == "steps" || key == "out" || key == "checkpoint-interval";
}

void require_compatible(const RunConfig& config, const RunConfig& saved) {
  for (const std::string& key : RunConfig::keys()) {
    if (resumable_key(key)) continue;
    if (config.get(key) != saved.get(key)) {
      throw ConfigError("cannot resume: " + key + " is " + config.get(key) + " but the checkpoint has " +
                        saved.get(key));
    }
  }
}

// Keeps the first `steps` records of an existing log.
void truncate_log(const std::filesystem::path& path, std::uint64_t steps) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (kept.size() < steps && std::getline(in, line)) kept.push_back(line);
  }
  std::ofstream out(path, std::ios::trunc);
  for (const auto& line : kept) out << line << '\n';
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, const char* prefix,
                                      std::uint64_t step) {
  return dir / (prefix + std::to_string(step) + ".cwgn");
}

}  // namespace

std::string loss_log_line(std::uint64_t step, const LossReport& report) {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["d_loss"] = report.d_loss;
  j["g_loss"] = report.g_loss;
  j["penalty"] = report.penalty;
  return j.dump();
}

TrainResult cmd_train(const RunConfig& config, const std::optional<Checkpoint>& resume) {
  config.validate();
  if (resume) require_compatible(config, resume->config);

  const Corpus corpus = make_corpus(config);
  const TrainSettings settings = config.train_settings();
  BatchIterator batches(corpus, settings.batch_size, data_seed(config.seed));

  Checkpoint ckpt;
  ckpt.config = config;
  if (resume) {
    ckpt.state = resume->state;
    batches.seek(resume->data_epoch, resume->data_cursor);
  } else {
    ckpt.state = TrainState::init(settings, config.seed);
  }

  const std::filesystem::path dir = config.output_dir();
  std::filesystem::create_directories(dir);
  {
    std::ofstream snapshot(dir / "config.txt", std::ios::trunc);
    snapshot << config.to_text();
  }
  const std::filesystem::path log_path = dir / "loss.log";
  if (resume) {
    truncate_log(log_path, ckpt.state.step);
  } else {
    std::ofstream(log_path, std::ios::trunc);
  }
  std::ofstream log(log_path, std::ios::app);

  TrainResult result;
  result.last_step = ckpt.state.step;
  auto save = [&](const std::filesystem::path& path) {
    ckpt.data_epoch = batches.epoch();
    ckpt.data_cursor = batches.cursor();
    save_checkpoint(ckpt, path);
    result.checkpoint = path;
  };

  while (ckpt.state.step < config.steps) {
    const std::uint64_t step = ckpt.state.step + 1;
    LossReport report;
    std::string failure;
    try {
      report = train_step(ckpt.state, batches, settings);
      if (!report.finite()) failure = "non-finite loss";
    } catch (const NumericError& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      log.flush();
      save(checkpoint_path(dir, "emergency-", step));
      result.exit_code = kExitNonFinite;
      result.last_step = step;
      result.message = "step " + std::to_string(step) + ": " + failure;
      return result;
    }
    log << loss_log_line(step, report) << '\n';
    result.last_step = step;
    if (config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0) {
      log.flush();
      save(checkpoint_path(dir, "ckpt-", step));
    }
  }
  log.flush();
  const auto final_path = checkpoint_path(dir, "ckpt-", ckpt.state.step);
  if (result.checkpoint != final_path) save(final_path);
  return result;
}

std::vector<std::vector<float>> generate_waveforms(const GeneratorParams<float>& gen,
                                                   const ModelConfig& cfg, int label,
                                                   std::size_t count, Rng& rng, std::size_t chunk) {
  if (label < 0 || static_cast<std::size_t>(label) >= cfg.num_classes) {
    throw InputError("label " + std::to_string(label) + " out of range [0, " +
                     std::to_string(cfg.num_classes) + ")");
  }
  std::vector<std::vector<float>> clips;
  clips.reserve(count);
  const std::size_t per_clip = cfg.length * cfg.channels;
  while (clips.size() < count) {
    const std::size_t n = std::min(chunk, count - clips.size());
    const Tensor<float> z = sample_uniform<float>({n, cfg.z_dim}, rng);
    const std::vector<int> labels(n, label);
    Graph<float> g(false);
    const Tensor<float> out = generator_forward(g, gen, z, labels, cfg);
    const auto v = out.values();
    for (std::size_t i = 0; i < n; ++i) {
      clips.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(i * per_clip),
                         v.begin() + static_cast<std::ptrdiff_t>((i + 1) * per_clip));
    }
  }
  return clips;
}

std::vector<std::filesystem::path> cmd_generate(const Checkpoint& ckpt, int label, std::size_t count,
                                                std::uint64_t seed,
                                                const std::filesystem::path& out_dir) {
  const ModelConfig& cfg = ckpt.config.model;
  if (cfg.channels != 1) throw ConfigError("WAV export supports mono models only");
  Rng rng(seed);
  const auto clips = generate_waveforms(ckpt.state.gen, cfg, label, count, rng);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "label%d_%04zu.wav", label, i);
    paths.push_back(out_dir / name);
    save_wav(clips[i], ckpt.config.sample_rate, paths.back());
  }
  return paths;
}

FidelityReport cmd_eval(const Checkpoint& ckpt, const std::string& corpus_spec,
                        std::size_t n_per_class, std::uint64_t seed) {
  RunConfig config = ckpt.config;
  config.corpus = corpus_spec;
  const Corpus real = make_corpus(config);
  Rng rng(seed);
  return evaluate_fidelity(
      real,
      [&](int label, std::size_t count) {
        return generate_waveforms(ckpt.state.gen, config.model, label, count, rng);
      },
      n_per_class);
}

}  // namespace cwavegan
