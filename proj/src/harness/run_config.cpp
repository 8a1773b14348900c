#include "cwavegan/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cwavegan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename U>
U parse_unsigned(const std::string& key, const std::string& v) {
  U out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid value '" + v + "' for " + key + " (expected a non-negative integer)");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid value '" + v + "' for " + key + " (expected a number)");
  }
  return out;
}

// Shortest text that parses back to the same value.
template <typename F>
std::string exact(F v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_unsigned<std::size_t>(key, trim(item)));
  if (out.empty()) throw ConfigError(key + " must list at least one value");
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CWG_UNSIGNED(member)                                                                  \
  Field {                                                                                     \
    [](RunConfig& c, const std::string& k, const std::string& v) {                            \
      c.member = parse_unsigned<decltype(c.member)>(k, v);                                    \
    },                                                                                        \
        [](const RunConfig& c) { return std::to_string(c.member); }                           \
  }

#define CWG_REAL(member)                                                                      \
  Field {                                                                                     \
    [](RunConfig& c, const std::string& k, const std::string& v) {                            \
      c.member = static_cast<decltype(c.member)>(parse_double(k, v));                         \
    },                                                                                        \
        [](const RunConfig& c) { return exact(c.member); }                                    \
  }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"d", CWG_UNSIGNED(model.d)},
      {"channels", CWG_UNSIGNED(model.channels)},
      {"length", CWG_UNSIGNED(model.length)},
      {"num-classes", CWG_UNSIGNED(model.num_classes)},
      {"z-dim", CWG_UNSIGNED(model.z_dim)},
      {"conditioning",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.model.conditioning = parse_conditioning(v);
        },
        [](const RunConfig& c) { return to_string(c.model.conditioning); }}},
      {"phase-shuffle", CWG_UNSIGNED(model.phase_shuffle)},
      {"loss",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.model.loss = parse_loss_mode(v);
        },
        [](const RunConfig& c) { return to_string(c.model.loss); }}},
      {"strides",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.model.strides = parse_list(k, v);
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t x : c.model.strides) s += (s.empty() ? "" : ",") + std::to_string(x);
          return s;
        }}},
      {"base-length", CWG_UNSIGNED(model.base_length)},
      {"kernel", CWG_UNSIGNED(model.kernel)},
      {"lr-g",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.lr_g = parse_double(k, v); },
        [](const RunConfig& c) {
          return exact(c.lr_g.value_or(default_learning_rate(c.model.loss)));
        }}},
      {"lr-d",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.lr_d = parse_double(k, v); },
        [](const RunConfig& c) {
          return exact(c.lr_d.value_or(default_learning_rate(c.model.loss)));
        }}},
      {"beta1", CWG_REAL(beta1)},
      {"beta2", CWG_REAL(beta2)},
      {"adam-eps", CWG_REAL(adam_eps)},
      {"gp-lambda", CWG_REAL(gp_lambda)},
      {"d-updates", CWG_UNSIGNED(d_updates)},
      {"batch-size", CWG_UNSIGNED(batch_size)},
      {"steps", CWG_UNSIGNED(steps)},
      {"seed", CWG_UNSIGNED(seed)},
      {"checkpoint-interval", CWG_UNSIGNED(checkpoint_interval)},
      {"corpus",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.corpus = v; },
        [](const RunConfig& c) { return c.corpus; }}},
      {"synth-per-class", CWG_UNSIGNED(synth_per_class)},
      {"sample-rate", CWG_UNSIGNED(sample_rate)},
      {"silence-threshold", CWG_REAL(silence_threshold)},
      {"out",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
        [](const RunConfig& c) { return c.out; }}},
  };
  return table;
}

#undef CWG_UNSIGNED
#undef CWG_REAL

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, f] : fields()) out.push_back(name);
    return out;
  }();
  return names;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, trim(value));
}

std::string RunConfig::get(const std::string& key) const { return field(key).get(*this); }

std::string RunConfig::to_text() const {
  std::string text;
  for (const auto& [name, f] : fields()) text += name + "=" + f.get(*this) + "\n";
  return text;
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    config.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void RunConfig::validate() const {
  model.validate();
  if (d_updates < 1) throw ConfigError("d-updates must be >= 1");
  if (batch_size < 1) throw ConfigError("batch-size must be >= 1");
  if (model.channels != 1) throw ConfigError("training data is mono; channels must be 1");
  if (corpus == "synthetic" && synth_per_class < 1) throw ConfigError("synth-per-class must be >= 1");
  if (sample_rate == 0) throw ConfigError("sample-rate must be positive");
}

TrainSettings RunConfig::train_settings() const {
  TrainSettings s;
  s.model = model;
  s.gen_opt = {lr_g.value_or(default_learning_rate(model.loss)), beta1, beta2, adam_eps};
  s.disc_opt = {lr_d.value_or(default_learning_rate(model.loss)), beta1, beta2, adam_eps};
  s.schedule.d_updates_per_g = d_updates;
  s.gp_lambda = gp_lambda;
  s.batch_size = batch_size;
  return s;
}

std::filesystem::path RunConfig::output_dir() const {
  if (!out.empty()) return out;
  if (const char* env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') return env;
  return "runs";
}

Corpus make_corpus(const RunConfig& config) {
  Corpus corpus;
  if (config.corpus == "synthetic") {
    Rng rng(config.seed, 3);
    corpus = synth_corpus(config.model.num_classes, config.synth_per_class, config.model.length, rng,
                          config.sample_rate);
  } else {
    corpus = load_corpus(config.corpus, config.model.length, config.silence_threshold);
  }
  if (corpus.num_classes() != config.model.num_classes) {
    throw ConfigError("corpus has " + std::to_string(corpus.num_classes()) +
                      " classes but num-classes is " + std::to_string(config.model.num_classes));
  }
  return corpus;
}

}  // namespace cwavegan
