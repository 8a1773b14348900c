#include "cwavegan/model.hpp"

namespace cwavegan {

std::string to_string(Conditioning c) {
  switch (c) {
    case Conditioning::none:
      return "none";
    case Conditioning::concat:
      return "concat";
    case Conditioning::scale:
      return "scale";
  }
  return "?";
}

std::string to_string(LossMode m) { return m == LossMode::dcgan ? "dcgan" : "wgan_gp"; }

Conditioning parse_conditioning(const std::string& s) {
  if (s == "none") return Conditioning::none;
  if (s == "concat") return Conditioning::concat;
  if (s == "scale") return Conditioning::scale;
  throw ConfigError("unknown conditioning '" + s + "' (expected none, concat or scale)");
}

LossMode parse_loss_mode(const std::string& s) {
  if (s == "dcgan") return LossMode::dcgan;
  if (s == "wgan_gp" || s == "wgan-gp") return LossMode::wgan_gp;
  throw ConfigError("unknown loss '" + s + "' (expected dcgan or wgan_gp)");
}

void ModelConfig::validate() const {
  if (d < 1) throw ConfigError("model size d must be >= 1");
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
  if (z_dim < 1) throw ConfigError("z_dim must be >= 1");
  if (kernel < 1) throw ConfigError("kernel length must be >= 1");
  if (base_length < 1) throw ConfigError("base_length must be >= 1");
  if (strides.empty()) throw ConfigError("stride list must not be empty");
  std::size_t len = base_length;
  std::string list;
  for (std::size_t s : strides) {
    if (s < 1) throw ConfigError("strides must be >= 1");
    len *= s;
    list += (list.empty() ? "" : ",") + std::to_string(s);
  }
  if (len != length) {
    throw ConfigError("output length " + std::to_string(length) + " is inconsistent with base " +
                      std::to_string(base_length) + " and strides [" + list + "] (gives " +
                      std::to_string(len) + ")");
  }
}

std::size_t ModelConfig::generator_input_dim() const {
  return z_dim + (conditioning == Conditioning::concat ? num_classes : 0);
}

std::size_t ModelConfig::discriminator_input_channels() const {
  return channels + (conditioning == Conditioning::concat ? num_classes : 0);
}

}  // namespace cwavegan
