#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwavegan/graph.hpp"
#include "cwavegan/random.hpp"
#include "cwavegan/tensor.hpp"

namespace cwavegan {

enum class Conditioning { none, concat, scale };
enum class LossMode { dcgan, wgan_gp };

std::string to_string(Conditioning c);
std::string to_string(LossMode m);
Conditioning parse_conditioning(const std::string& s);
LossMode parse_loss_mode(const std::string& s);

/// Architecture knobs shared by generator and discriminator.
///
/// `strides` is the generator's upsampling list; the discriminator uses it
/// reversed. With K strides the generator feature maps carry
/// d*2^(K-1), ..., 2d, d channels before the final c-channel layer, so the
/// default K = 5 gives the 16d -> 8d -> 4d -> 2d -> d -> c progression.
struct ModelConfig {
  std::size_t d = 64;
  std::size_t channels = 1;
  std::size_t length = 8192;
  std::size_t num_classes = 10;
  std::size_t z_dim = 100;
  Conditioning conditioning = Conditioning::concat;
  std::size_t phase_shuffle = 2;
  LossMode loss = LossMode::wgan_gp;
  std::vector<std::size_t> strides = {4, 4, 4, 4, 2};
  std::size_t base_length = 16;
  std::size_t kernel = 25;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  std::size_t layers() const { return strides.size(); }
  // Channels of the discriminator feature map after conv `level` (0-based),
  // equal to the generator's channels entering the mirrored layer.
  std::size_t feature_channels(std::size_t level) const { return d << level; }
  std::size_t top_channels() const { return feature_channels(layers() - 1); }
  std::size_t generator_input_dim() const;
  std::size_t discriminator_input_channels() const;
};

template <typename T>
using NamedTensors = std::vector<std::pair<std::string, Tensor<T>>>;

template <typename T>
struct GeneratorParams {
  Tensor<T> dense_w;  // (z_eff, base_length * top_channels)
  Tensor<T> dense_b;
  std::vector<Tensor<T>> conv_w;  // (kernel, c_in, c_out), one per transposed conv
  std::vector<Tensor<T>> conv_b;
  // (num_classes, channels) per ReLU site; only with Conditioning::scale.
  std::vector<Tensor<T>> scale_embed;

  NamedTensors<T> named_parameters() const;
};

template <typename T>
struct DiscriminatorParams {
  std::vector<Tensor<T>> conv_w;  // (kernel, c_in, c_out), one per conv
  std::vector<Tensor<T>> conv_b;
  Tensor<T> dense_w;  // (base_length * top_channels, 1)
  Tensor<T> dense_b;
  // (num_classes, channels) per LReLU site; only with Conditioning::scale.
  std::vector<Tensor<T>> scale_embed;

  NamedTensors<T> named_parameters() const;
};

std::size_t parameter_count(const NamedTensors<float>& params);
std::size_t parameter_count(const NamedTensors<double>& params);

/// Intermediate activation shapes, in execution order.
struct LayerShape {
  std::string name;
  Shape shape;
};
using LayerTrace = std::vector<LayerShape>;

template <typename T>
GeneratorParams<T> build_generator(const ModelConfig& cfg, Rng& rng);
template <typename T>
DiscriminatorParams<T> build_discriminator(const ModelConfig& cfg, Rng& rng);

/// z (n, z_dim), one label per row -> waveform (n, length, channels) in [-1, 1].
template <typename T>
Tensor<T> generator_forward(Graph<T>& g, const GeneratorParams<T>& p, const Tensor<T>& z,
                            std::span<const int> labels, const ModelConfig& cfg,
                            LayerTrace* trace = nullptr);

/// x (n, length, channels) -> raw score (n, 1). Phase shuffle runs only when
/// `shuffle_rng` is given (training).
template <typename T>
Tensor<T> discriminator_forward(Graph<T>& g, const DiscriminatorParams<T>& p, const Tensor<T>& x,
                                std::span<const int> labels, const ModelConfig& cfg,
                                Rng* shuffle_rng, LayerTrace* trace = nullptr);

/// Time-shifts each (item, channel) feature map of x (n, L, c) by
/// shifts[item * c + channel] samples; positions shifted in from outside are
/// filled by reflection about the edge sample (no edge repeat).
template <typename T>
Tensor<T> time_shift(Graph<T>& g, const Tensor<T>& x, std::span<const int> shifts);

/// Draws one shift per feature map uniformly from [-radius, radius] and
/// applies time_shift. radius == 0 is the identity and consumes no draws.
template <typename T>
Tensor<T> phase_shuffle(Graph<T>& g, const Tensor<T>& x, std::size_t radius, Rng& rng);

}  // namespace cwavegan
