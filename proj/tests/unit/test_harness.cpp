#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cwavegan/commands.hpp"
#include "cwavegan/errors.hpp"
#include "support/tempdir.hpp"

using namespace cwavegan;
using testing_support::TempDir;

namespace {

RunConfig tiny_run(const std::filesystem::path& out) {
  RunConfig c;
  c.model.d = 2;
  c.model.length = 256;
  c.model.strides = {4, 4};
  c.model.kernel = 9;
  c.model.num_classes = 2;
  c.model.z_dim = 4;
  c.batch_size = 4;
  c.synth_per_class = 4;
  c.steps = 10;
  c.seed = 7;
  c.out = out.string();
  return c;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<float> flatten(const NamedTensors<float>& params) {
  std::vector<float> out;
  for (const auto& [n, t] : params) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

}  // namespace

TEST_CASE("run config text roundtrip") {
  RunConfig c = tiny_run("somewhere");
  c.model.conditioning = Conditioning::scale;
  c.model.loss = LossMode::dcgan;
  c.lr_g = 3.5e-4;
  c.beta1 = 0.5;
  c.gp_lambda = 2.25;
  c.silence_threshold = 0.015f;
  c.checkpoint_interval = 3;
  const RunConfig back = RunConfig::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  for (const auto& key : RunConfig::keys()) CHECK(back.get(key) == c.get(key));
  CHECK(back.model.strides == std::vector<std::size_t>{4, 4});
  CHECK(back.lr_g == 3.5e-4);
  CHECK(back.silence_threshold == 0.015f);
}

TEST_CASE("run config rejects unknown keys and bad values") {
  RunConfig c;
  CHECK_THROWS_AS(c.set("learning-rate", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("d", "-3"), ConfigError);
  CHECK_THROWS_AS(c.set("beta1", "abc"), ConfigError);
  CHECK_THROWS_AS(c.set("conditioning", "film"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("d=4\nbogus=1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("d 4\n"), ConfigError);
  const RunConfig parsed = RunConfig::from_text("# comment\n\nd=4\nloss=dcgan\n");
  CHECK(parsed.model.d == 4);
  CHECK(parsed.get("lr-g") == parsed.get("lr-d"));
  CHECK(parsed.train_settings().gen_opt.lr == 2e-4);
}

TEST_CASE("checkpoint roundtrip restores every tensor and counter") {
  const RunConfig c = tiny_run("unused");
  Checkpoint ckpt;
  ckpt.config = c;
  ckpt.state = TrainState::init(c.train_settings(), 11);
  ckpt.state.step = 42;
  ckpt.state.gen_opt.t = 42;
  ckpt.state.disc_opt.t = 210;
  ckpt.state.rng.uniform01();
  ckpt.data_epoch = 3;
  ckpt.data_cursor = 1;
  for (float& v : ckpt.state.gen_opt.m[0].mutable_values()) v = 0.125f;

  const auto bytes = encode_checkpoint(ckpt);
  REQUIRE(bytes.size() > 8);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CWGN");
  const Checkpoint back = decode_checkpoint(bytes);
  CHECK(encode_checkpoint(back) == bytes);
  CHECK(back.state.step == 42);
  CHECK(back.state.disc_opt.t == 210);
  CHECK(back.data_epoch == 3);
  CHECK(back.data_cursor == 1);
  CHECK(flatten(back.state.gen.named_parameters()) == flatten(ckpt.state.gen.named_parameters()));
  Rng r1 = back.state.rng, r2 = ckpt.state.rng;
  CHECK(r1.uniform01() == r2.uniform01());

  TempDir dir("ckpt");
  save_checkpoint(ckpt, dir.path() / "a.cwgn");
  CHECK(read_bytes(dir.path() / "a.cwgn") == bytes);
  CHECK(encode_checkpoint(load_checkpoint(dir.path() / "a.cwgn")) == bytes);
}

TEST_CASE("checkpoint decoding errors") {
  const RunConfig c = tiny_run("unused");
  Checkpoint ckpt;
  ckpt.config = c;
  ckpt.state = TrainState::init(c.train_settings(), 1);
  const auto bytes = encode_checkpoint(ckpt);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bad_magic), FormatError);

  auto bad_version = bytes;
  bad_version[4] = 99;
  CHECK_THROWS_AS(decode_checkpoint(bad_version), FormatError);

  const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 5);
  CHECK_THROWS_AS(decode_checkpoint(truncated), ParseError);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_checkpoint(trailing), ParseError);

  // A checkpoint of a wider model does not fit the config it is paired with.
  Checkpoint wide = ckpt;
  RunConfig wider = c;
  wider.model.d = 3;
  wide.state = TrainState::init(wider.train_settings(), 1);
  CHECK_THROWS_AS(decode_checkpoint(encode_checkpoint(wide)), FormatError);
}

TEST_CASE("training runs are deterministic and write one record per step") {
  TempDir a("train-a"), b("train-b");
  const RunConfig ca = tiny_run(a.path());
  const RunConfig cb = tiny_run(b.path());
  const TrainResult ra = cmd_train(ca);
  const TrainResult rb = cmd_train(cb);
  CHECK(ra.exit_code == 0);
  CHECK(ra.last_step == 10);
  CHECK(std::filesystem::exists(a.path() / "ckpt-10.cwgn"));
  const auto log_a = read_lines(a.path() / "loss.log");
  CHECK(log_a == read_lines(b.path() / "loss.log"));
  REQUIRE(log_a.size() == 10);
  for (std::size_t i = 0; i < log_a.size(); ++i) {
    const auto j = nlohmann::json::parse(log_a[i]);
    CHECK(j.at("step").get<std::uint64_t>() == i + 1);
    CHECK(std::isfinite(j.at("d_loss").get<double>()));
    CHECK(std::isfinite(j.at("g_loss").get<double>()));
    CHECK(j.at("penalty").get<double>() >= 0);
  }
  CHECK(RunConfig::from_file(a.path() / "config.txt").to_text() == ca.to_text());
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
  TempDir dir("resume");
  RunConfig c = tiny_run(dir.path());
  c.checkpoint_interval = 5;
  REQUIRE(cmd_train(c).exit_code == 0);
  const auto full_log = read_lines(dir.path() / "loss.log");
  const auto full_ckpt = read_bytes(dir.path() / "ckpt-10.cwgn");
  REQUIRE(std::filesystem::exists(dir.path() / "ckpt-5.cwgn"));

  const Checkpoint mid = load_checkpoint(dir.path() / "ckpt-5.cwgn");
  CHECK(mid.state.step == 5);
  std::filesystem::remove(dir.path() / "ckpt-10.cwgn");
  REQUIRE(cmd_train(c, mid).exit_code == 0);
  CHECK(read_lines(dir.path() / "loss.log") == full_log);
  CHECK(read_bytes(dir.path() / "ckpt-10.cwgn") == full_ckpt);
}

TEST_CASE("resume refuses a config that changes the run") {
  TempDir dir("resume-bad");
  RunConfig c = tiny_run(dir.path());
  c.steps = 2;
  REQUIRE(cmd_train(c).exit_code == 0);
  const Checkpoint ckpt = load_checkpoint(dir.path() / "ckpt-2.cwgn");
  RunConfig other = c;
  other.seed = 8;
  CHECK_THROWS_AS(cmd_train(other, ckpt), ConfigError);
  RunConfig longer = c;
  longer.steps = 3;
  CHECK(cmd_train(longer, ckpt).last_step == 3);
}

TEST_CASE("non-finite training writes an emergency checkpoint") {
  TempDir dir("blowup");
  RunConfig c = tiny_run(dir.path());
  c.model.loss = LossMode::dcgan;
  c.lr_d = 1e38;
  c.lr_g = 1e38;
  const TrainResult r = cmd_train(c);
  CHECK(r.exit_code == kExitNonFinite);
  CHECK(r.message.find("step " + std::to_string(r.last_step)) == 0);
  CHECK(r.checkpoint.filename() == "emergency-" + std::to_string(r.last_step) + ".cwgn");
  CHECK(std::filesystem::exists(r.checkpoint));
  CHECK(read_lines(dir.path() / "loss.log").size() == r.last_step - 1);
}

TEST_CASE("dcgan first step is near equilibrium") {
  TempDir dir("dcgan-first");
  RunConfig c = tiny_run(dir.path());
  c.model.loss = LossMode::dcgan;
  c.steps = 1;
  REQUIRE(cmd_train(c).exit_code == 0);
  const auto j = nlohmann::json::parse(read_lines(dir.path() / "loss.log").at(0));
  const double d_loss = j.at("d_loss").get<double>();
  CHECK(std::abs(d_loss - 2 * std::log(2.0)) < 1.0);
  CHECK(d_loss > 0.5);
  CHECK(d_loss < 3.0);
}

TEST_CASE("generate writes deterministic full-length WAV files") {
  RunConfig c;
  c.model.d = 2;
  c.model.num_classes = 2;
  Checkpoint ckpt;
  ckpt.config = c;
  ckpt.state = TrainState::init(c.train_settings(), 3);
  TempDir a("gen-a"), b("gen-b");
  const auto files_a = cmd_generate(ckpt, 1, 3, 99, a.path());
  const auto files_b = cmd_generate(ckpt, 1, 3, 99, b.path());
  REQUIRE(files_a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(files_a[i].filename() == files_b[i].filename());
    CHECK(files_a[i].filename().string().find("label1") != std::string::npos);
    CHECK(read_bytes(files_a[i]) == read_bytes(files_b[i]));
    const WavData w = load_wav(files_a[i]);
    CHECK(w.samples.size() == 8192);
    CHECK(w.sample_rate == 16000);
    for (float v : w.samples) CHECK((v >= -1.0f && v < 1.0f));
  }
  CHECK(read_bytes(files_a[0]) != read_bytes(files_a[1]));
  CHECK_THROWS_AS(cmd_generate(ckpt, 2, 1, 1, a.path()), InputError);
  CHECK_THROWS_AS(cmd_generate(ckpt, -1, 1, 1, a.path()), InputError);
}

TEST_CASE("fidelity of a memorizing generator is perfect") {
  Rng rng(21);
  const Corpus real = synth_corpus(4, 3, 1024, rng);
  const ClipSource memorize = [&](int label, std::size_t count) {
    std::vector<std::vector<float>> out;
    for (const auto& clip : real.clips)
      if (clip.label == label && out.empty()) out.assign(count, clip.samples);
    return out;
  };
  const FidelityReport r = evaluate_fidelity(real, memorize, 5);
  CHECK(r.overall == 1.0);
  for (double a : r.per_class) CHECK(a == 1.0);
}

TEST_CASE("fidelity of a noise generator is near chance") {
  Rng rng(22);
  const Corpus real = synth_corpus(2, 8, 1024, rng);
  Rng noise(23);
  const ClipSource random_noise = [&](int, std::size_t count) {
    std::vector<std::vector<float>> out(count, std::vector<float>(1024));
    for (auto& clip : out)
      for (float& v : clip) v = static_cast<float>(2 * noise.uniform01() - 1);
    return out;
  };
  const FidelityReport r = evaluate_fidelity(real, random_noise, 100);
  CHECK(r.counts == std::vector<std::size_t>{100, 100});
  CHECK(r.overall >= 0.35);
  CHECK(r.overall <= 0.65);
}

TEST_CASE("fidelity needs two classes") {
  Rng rng(24);
  const Corpus one = synth_corpus(1, 3, 256, rng);
  const ClipSource silent = [](int, std::size_t count) {
    return std::vector<std::vector<float>>(count, std::vector<float>(256));
  };
  CHECK_THROWS_AS(evaluate_fidelity(one, silent, 2), ConfigError);
}

TEST_CASE("eval on an untrained checkpoint reports every class") {
  const RunConfig c = tiny_run("unused");
  Checkpoint ckpt;
  ckpt.config = c;
  ckpt.state = TrainState::init(c.train_settings(), 5);
  const FidelityReport a = cmd_eval(ckpt, "synthetic", 4, 1);
  const FidelityReport b = cmd_eval(ckpt, "synthetic", 4, 1);
  CHECK(a.per_class.size() == 2);
  CHECK(a.counts == std::vector<std::size_t>{4, 4});
  CHECK(a.overall == b.overall);
}

TEST_CASE("loss log records are JSON objects in a fixed key order") {
  LossReport r;
  r.d_loss = 1.5;
  r.g_loss = -0.25;
  r.penalty = 0;
  CHECK(loss_log_line(3, r) == R"({"step":3,"d_loss":1.5,"g_loss":-0.25,"penalty":0.0})");
}
