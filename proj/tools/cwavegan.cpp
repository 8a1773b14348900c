// Command-line front end: train, generate, eval, config.

#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>

#include "cwavegan/commands.hpp"

using namespace cwavegan;

namespace {

// One --<key> option per config key; values are applied over the base config
// in key order.
void add_config_flags(CLI::App& cmd, std::map<std::string, std::string>& overrides) {
  for (const std::string& key : RunConfig::keys()) {
    cmd.add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "config value '" + key + "' (default " + RunConfig{}.get(key) + ")");
  }
}

void apply_overrides(RunConfig& config, const std::map<std::string, std::string>& overrides) {
  for (const std::string& key : RunConfig::keys()) {
    if (auto it = overrides.find(key); it != overrides.end()) config.set(key, it->second);
  }
}

void print_report(const FidelityReport& report) {
  std::cout << std::fixed << std::setprecision(4);
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    std::cout << "class " << k << ": " << report.per_class[k] << " (" << report.counts[k] << " clips)\n";
  }
  std::cout << "overall: " << report.overall << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional WaveGAN: train, sample and evaluate label-conditioned waveform GANs"};
  app.require_subcommand(1);

  std::map<std::string, std::string> overrides;
  std::string config_file;
  std::string resume;

  auto* train = app.add_subcommand("train", "train a model; flags override --config");
  train->add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
  train->add_option("--resume", resume, "continue from a checkpoint")->check(CLI::ExistingFile);
  add_config_flags(*train, overrides);

  auto* show = app.add_subcommand("config", "print the resolved config");
  show->add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
  add_config_flags(*show, overrides);

  std::string checkpoint;
  int label = 0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "write generated clips as WAV files");
  generate->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  generate->add_option("--label", label, "class label")->required();
  generate->add_option("--count", count, "number of clips")->capture_default_str();
  generate->add_option("--seed", seed, "latent seed")->capture_default_str();
  generate->add_option("--out", out_dir, "output directory")->required();

  std::string corpus = "synthetic";
  std::size_t n_per_class = 40;
  auto* eval = app.add_subcommand("eval", "spectral-prototype conditional fidelity");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--corpus", corpus, "'synthetic' or a corpus root directory")->capture_default_str();
  eval->add_option("--n-per-class", n_per_class, "clips generated per class")->capture_default_str();
  eval->add_option("--seed", seed, "latent seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train || *show) {
      std::optional<Checkpoint> from;
      RunConfig config;
      if (!resume.empty()) {
        from = load_checkpoint(resume);
        config = from->config;
      } else if (!config_file.empty()) {
        config = RunConfig::from_file(config_file);
      }
      apply_overrides(config, overrides);
      config.validate();
      if (*show) {
        std::cout << config.to_text();
        return 0;
      }
      const TrainResult result = cmd_train(config, from);
      if (result.exit_code != 0) {
        std::cerr << "training stopped at " << result.message << "; state saved to "
                  << result.checkpoint.string() << "\n";
        return result.exit_code;
      }
      std::cout << "trained to step " << result.last_step << "; checkpoint " << result.checkpoint.string()
                << "\n";
    } else if (*generate) {
      const Checkpoint ckpt = load_checkpoint(checkpoint);
      for (const auto& path : cmd_generate(ckpt, label, count, seed, out_dir)) {
        std::cout << path.string() << "\n";
      }
    } else if (*eval) {
      print_report(cmd_eval(load_checkpoint(checkpoint), corpus, n_per_class, seed));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
