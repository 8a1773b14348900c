#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

#include "cwavegan/audio.hpp"

namespace cwavegan {

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                           " bytes, " + std::to_string(remaining()) + " left",
                       pos_);
    }
  }

  std::string_view tag(const char* what) {
    need(4, what);
    std::string_view s(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return s;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    const auto* p = bytes_.data() + pos_;
    pos_ += 4;
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto* p = bytes_.data() + pos_;
    pos_ += 2;
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
  }

  void skip(std::size_t n, const char* what) {
    need(n, what);
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

WavData parse_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.tag("RIFF header") != "RIFF") throw FormatError("not a RIFF file (missing 'RIFF' tag)");
  r.u32("RIFF chunk size");
  if (r.tag("WAVE tag") != "WAVE") throw FormatError("RIFF file is not WAVE (missing 'WAVE' tag)");

  bool have_fmt = false;
  WavData out;
  while (r.remaining() > 0) {
    const std::size_t chunk_at = r.offset();
    const std::string_view id = r.tag("chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16) throw ParseError("fmt chunk shorter than 16 bytes", chunk_at);
      r.need(size, "fmt chunk");
      const std::uint16_t format = r.u16("audio_format");
      const std::uint16_t channels = r.u16("num_channels");
      out.sample_rate = r.u32("sample_rate");
      r.u32("byte_rate");
      r.u16("block_align");
      const std::uint16_t bits = r.u16("bits_per_sample");
      r.skip(size - 16 + (size & 1u), "fmt chunk");
      if (format != 1) {
        throw FormatError("unsupported audio_format " + std::to_string(format) + " (need 1 = PCM)");
      }
      if (bits != 16) {
        throw FormatError("unsupported bits_per_sample " + std::to_string(bits) + " (need 16)");
      }
      if (channels != 1) {
        throw FormatError("unsupported num_channels " + std::to_string(channels) + " (need 1)");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("data chunk before fmt chunk", chunk_at);
      if (size % 2 != 0) throw ParseError("data chunk size is not a multiple of 2", chunk_at);
      r.need(size, "data chunk");
      out.samples.resize(size / 2);
      for (float& s : out.samples) {
        s = static_cast<float>(static_cast<std::int16_t>(r.u16("sample"))) / 32768.0f;
      }
      return out;
    } else {
      r.skip(size + (size & 1u), "chunk body");
    }
  }
  throw ParseError(have_fmt ? "missing data chunk" : "missing fmt chunk", r.offset());
}

WavData load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_wav(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, std::uint32_t sample_rate,
                                     std::size_t* clipped) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  std::size_t clip_count = 0;
  for (float s : samples) {
    if (!(s >= -1.0f && s <= 1.0f)) ++clip_count;
    double v = std::nearbyint(static_cast<double>(s) * 32768.0);
    if (std::isnan(v)) v = 0;
    v = std::clamp(v, -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  if (clipped) *clipped = clip_count;
  return out;
}

std::size_t save_wav(std::span<const float> samples, std::uint32_t sample_rate,
                     const std::filesystem::path& path) {
  std::size_t clipped = 0;
  const std::vector<std::uint8_t> bytes = encode_wav(samples, sample_rate, &clipped);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
  return clipped;
}

}  // namespace cwavegan
