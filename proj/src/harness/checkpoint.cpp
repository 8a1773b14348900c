#include "cwavegan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cwavegan {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'W', 'G', 'N'};

class Writer {
 public:
  template <typename U>
  void put(U v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(U));
  }
  void put_string64(const std::string& s) {
    put<std::uint64_t>(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void put_tensor(const std::string& name, const Tensor<float>& t) {
    put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    bytes_.insert(bytes_.end(), name.begin(), name.end());
    put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(d);
    for (float v : t.values()) put<float>(v);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  std::string get_string(std::uint64_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n, const char* what) {
    if (n > bytes_.size() - pos_) throw ParseError(std::string("truncated checkpoint reading ") + what, pos_);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Every tensor of the checkpoint in file order.
std::vector<std::pair<std::string, Tensor<float>>> checkpoint_tensors(const TrainState& s) {
  std::vector<std::pair<std::string, Tensor<float>>> out;
  const auto gen = s.gen.named_parameters();
  const auto disc = s.disc.named_parameters();
  for (const auto& [n, t] : gen) out.emplace_back("gen." + n, t);
  for (const auto& [n, t] : disc) out.emplace_back("disc." + n, t);
  for (std::size_t i = 0; i < gen.size(); ++i) out.emplace_back("opt.gen.m." + gen[i].first, s.gen_opt.m[i]);
  for (std::size_t i = 0; i < gen.size(); ++i) out.emplace_back("opt.gen.v." + gen[i].first, s.gen_opt.v[i]);
  for (std::size_t i = 0; i < disc.size(); ++i) out.emplace_back("opt.disc.m." + disc[i].first, s.disc_opt.m[i]);
  for (std::size_t i = 0; i < disc.size(); ++i) out.emplace_back("opt.disc.v." + disc[i].first, s.disc_opt.v[i]);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  for (char c : kMagic) w.put<char>(c);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put_string64(ckpt.config.to_text());
  w.put<std::uint64_t>(ckpt.state.step);
  w.put<std::uint64_t>(ckpt.state.gen_opt.t);
  w.put<std::uint64_t>(ckpt.state.disc_opt.t);
  w.put<std::uint64_t>(ckpt.data_epoch);
  w.put<std::uint64_t>(ckpt.data_cursor);
  w.put_string64(ckpt.state.rng.state());
  const auto tensors = checkpoint_tensors(ckpt.state);
  w.put<std::uint64_t>(tensors.size());
  for (const auto& [name, t] : tensors) w.put_tensor(name, t);
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  for (char& c : magic) c = r.get<char>("magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("checkpoint magic: not a CWGN file");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version: unsupported version " + std::to_string(version));
  }

  Checkpoint ckpt;
  ckpt.config = RunConfig::from_text(r.get_string(r.get<std::uint64_t>("config length"), "config"));
  ckpt.config.validate();
  const TrainSettings settings = ckpt.config.train_settings();
  ckpt.state = TrainState::init(settings, ckpt.config.seed);
  ckpt.state.step = r.get<std::uint64_t>("step");
  ckpt.state.gen_opt.t = r.get<std::uint64_t>("generator optimizer step");
  ckpt.state.disc_opt.t = r.get<std::uint64_t>("discriminator optimizer step");
  ckpt.data_epoch = r.get<std::uint64_t>("data epoch");
  ckpt.data_cursor = r.get<std::uint64_t>("data cursor");
  ckpt.state.rng.restore(r.get_string(r.get<std::uint64_t>("rng length"), "rng state"));

  const auto expected = checkpoint_tensors(ckpt.state);
  const auto count = r.get<std::uint64_t>("tensor count");
  if (count != expected.size()) {
    throw FormatError("checkpoint tensor count: expected " + std::to_string(expected.size()) + ", found " +
                      std::to_string(count));
  }
  for (const auto& [name, target] : expected) {
    const std::size_t at = r.pos();
    const std::string found = r.get_string(r.get<std::uint32_t>("name length"), "tensor name");
    if (found != name) throw FormatError("checkpoint tensor name: expected " + name + ", found " + found);
    const auto rank = r.get<std::uint32_t>("tensor rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint64_t>("tensor dims");
    if (shape != target.shape()) {
      throw FormatError("checkpoint tensor " + name + " at byte " + std::to_string(at) + ": shape " +
                        shape_str(shape) + " does not match model shape " + shape_str(target.shape()));
    }
    Tensor<float> t = target;  // shares storage with the state
    for (float& v : t.mutable_values()) v = r.get<float>("tensor values");
  }
  if (!r.done()) throw ParseError("trailing bytes after checkpoint", r.pos());
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write checkpoint " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace cwavegan
