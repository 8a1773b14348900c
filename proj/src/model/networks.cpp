#include <cmath>

#include "cwavegan/model.hpp"
#include "cwavegan/ops.hpp"

namespace cwavegan {

namespace {

// Zero-mean uniform in +-sqrt(6 / fan_in).
template <typename T>
Tensor<T> init_uniform(const Shape& shape, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor<T> t(shape, true);
  for (T& v : t.mutable_values()) v = static_cast<T>(limit * (2.0 * rng.uniform01() - 1.0));
  return t;
}

template <typename T>
Tensor<T> zeros_param(const Shape& shape) {
  return Tensor<T>(shape, true);
}

template <typename T>
Tensor<T> ones_param(const Shape& shape) {
  Tensor<T> t = Tensor<T>::full(shape, T(1));
  t.set_requires_grad(true);
  return t;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void trace_shape(LayerTrace* trace, std::string name, const Shape& shape) {
  if (trace) trace->push_back({std::move(name), shape});
}

void check_labels(std::span<const int> labels, std::size_t n, std::size_t classes) {
  if (labels.size() != n) {
    throw InputError("expected " + std::to_string(n) + " labels, got " +
                     std::to_string(labels.size()));
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InputError("label " + std::to_string(y) + " outside [0, " + std::to_string(classes) +
                       ")");
    }
  }
}

// Per-item channel scales for one conditional-scaling site.
template <typename T>
Tensor<T> apply_label_scale(Graph<T>& g, const Tensor<T>& h, const Tensor<T>& onehot,
                            const Tensor<T>& table) {
  return ops::scale_channels(g, h, ops::matmul(g, onehot, table));
}

}  // namespace

template <typename T>
NamedTensors<T> GeneratorParams<T>::named_parameters() const {
  NamedTensors<T> out{{"dense.w", dense_w}, {"dense.b", dense_b}};
  for (std::size_t i = 0; i < conv_w.size(); ++i) {
    out.emplace_back("tconv" + std::to_string(i + 1) + ".w", conv_w[i]);
    out.emplace_back("tconv" + std::to_string(i + 1) + ".b", conv_b[i]);
  }
  for (std::size_t i = 0; i < scale_embed.size(); ++i) {
    out.emplace_back("scale" + std::to_string(i) + ".embed", scale_embed[i]);
  }
  return out;
}

template <typename T>
NamedTensors<T> DiscriminatorParams<T>::named_parameters() const {
  NamedTensors<T> out;
  for (std::size_t i = 0; i < conv_w.size(); ++i) {
    out.emplace_back("conv" + std::to_string(i + 1) + ".w", conv_w[i]);
    out.emplace_back("conv" + std::to_string(i + 1) + ".b", conv_b[i]);
  }
  out.emplace_back("dense.w", dense_w);
  out.emplace_back("dense.b", dense_b);
  for (std::size_t i = 0; i < scale_embed.size(); ++i) {
    out.emplace_back("scale" + std::to_string(i + 1) + ".embed", scale_embed[i]);
  }
  return out;
}

template <typename T>
static std::size_t count_params(const NamedTensors<T>& params) {
  std::size_t n = 0;
  for (const auto& [name, t] : params) n += t.numel();
  return n;
}

std::size_t parameter_count(const NamedTensors<float>& params) { return count_params(params); }
std::size_t parameter_count(const NamedTensors<double>& params) { return count_params(params); }

template <typename T>
GeneratorParams<T> build_generator(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t k = cfg.layers();
  const std::size_t top = cfg.top_channels();
  const std::size_t in = cfg.generator_input_dim();
  GeneratorParams<T> p;
  p.dense_w = init_uniform<T>({in, cfg.base_length * top}, in, rng);
  p.dense_b = zeros_param<T>({cfg.base_length * top});
  std::size_t c_in = top;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t c_out = i + 1 < k ? cfg.feature_channels(k - 2 - i) : cfg.channels;
    // Each output sample of a stride-s transposed conv sums ceil(k/s) taps.
    const std::size_t fan_in = ceil_div(cfg.kernel, cfg.strides[i]) * c_in;
    p.conv_w.push_back(init_uniform<T>({cfg.kernel, c_in, c_out}, fan_in, rng));
    p.conv_b.push_back(zeros_param<T>({c_out}));
    c_in = c_out;
  }
  if (cfg.conditioning == Conditioning::scale) {
    // One site after the dense ReLU and one after every hidden transposed conv.
    p.scale_embed.push_back(ones_param<T>({cfg.num_classes, top}));
    for (std::size_t i = 0; i + 1 < k; ++i) {
      p.scale_embed.push_back(ones_param<T>({cfg.num_classes, cfg.feature_channels(k - 2 - i)}));
    }
  }
  return p;
}

template <typename T>
DiscriminatorParams<T> build_discriminator(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t k = cfg.layers();
  DiscriminatorParams<T> p;
  std::size_t c_in = cfg.discriminator_input_channels();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t c_out = cfg.feature_channels(i);
    p.conv_w.push_back(init_uniform<T>({cfg.kernel, c_in, c_out}, cfg.kernel * c_in, rng));
    p.conv_b.push_back(zeros_param<T>({c_out}));
    c_in = c_out;
  }
  const std::size_t flat = cfg.base_length * cfg.top_channels();
  p.dense_w = init_uniform<T>({flat, 1}, flat, rng);
  p.dense_b = zeros_param<T>({1});
  if (cfg.conditioning == Conditioning::scale) {
    for (std::size_t i = 0; i < k; ++i) {
      p.scale_embed.push_back(ones_param<T>({cfg.num_classes, cfg.feature_channels(i)}));
    }
  }
  return p;
}

template <typename T>
Tensor<T> generator_forward(Graph<T>& g, const GeneratorParams<T>& p, const Tensor<T>& z,
                            std::span<const int> labels, const ModelConfig& cfg,
                            LayerTrace* trace) {
  if (z.rank() != 2 || z.dim(1) != cfg.z_dim) {
    throw DimensionError("generator: z must be (n, " + std::to_string(cfg.z_dim) + "), got " +
                         shape_str(z.shape()));
  }
  const std::size_t n = z.dim(0);
  const std::size_t k = cfg.layers();
  Tensor<T> onehot;
  if (cfg.conditioning != Conditioning::none) {
    check_labels(labels, n, cfg.num_classes);
    onehot = ops::one_hot<T>(labels, cfg.num_classes);
  }
  trace_shape(trace, "input", z.shape());

  Tensor<T> h = z;
  if (cfg.conditioning == Conditioning::concat) {
    h = ops::concat(g, h, onehot, 1);
    trace_shape(trace, "concat_label", h.shape());
  }
  h = ops::dense(g, h, p.dense_w, p.dense_b);
  trace_shape(trace, "dense", h.shape());
  h = ops::reshape(g, h, Shape{n, cfg.base_length, cfg.top_channels()});
  trace_shape(trace, "reshape", h.shape());
  h = ops::relu(g, h);
  if (cfg.conditioning == Conditioning::scale) h = apply_label_scale(g, h, onehot, p.scale_embed[0]);
  trace_shape(trace, "relu", h.shape());

  for (std::size_t i = 0; i < k; ++i) {
    h = ops::add_bias(g, ops::trans_conv1d(g, h, p.conv_w[i], cfg.strides[i]), p.conv_b[i]);
    trace_shape(trace, "trans_conv" + std::to_string(i + 1), h.shape());
    if (i + 1 == k) {
      h = ops::tanh(g, h);
      trace_shape(trace, "tanh", h.shape());
    } else {
      h = ops::relu(g, h);
      if (cfg.conditioning == Conditioning::scale) {
        h = apply_label_scale(g, h, onehot, p.scale_embed[i + 1]);
      }
      trace_shape(trace, "relu", h.shape());
    }
  }
  return h;
}

template <typename T>
Tensor<T> discriminator_forward(Graph<T>& g, const DiscriminatorParams<T>& p, const Tensor<T>& x,
                                std::span<const int> labels, const ModelConfig& cfg,
                                Rng* shuffle_rng, LayerTrace* trace) {
  if (x.rank() != 3 || x.dim(1) != cfg.length || x.dim(2) != cfg.channels) {
    throw InputError("discriminator: input must be (n, " + std::to_string(cfg.length) + ", " +
                     std::to_string(cfg.channels) + "), got " + shape_str(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t k = cfg.layers();
  Tensor<T> onehot;
  if (cfg.conditioning != Conditioning::none) {
    check_labels(labels, n, cfg.num_classes);
    onehot = ops::one_hot<T>(labels, cfg.num_classes);
  }
  trace_shape(trace, "input", x.shape());

  Tensor<T> h = x;
  if (cfg.conditioning == Conditioning::concat) {
    h = ops::concat(g, h, ops::expand_axis(g, onehot, 1, cfg.length), 2);
    trace_shape(trace, "concat_label", h.shape());
  }
  const T slope = static_cast<T>(ops::kLeakySlope);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t stride = cfg.strides[k - 1 - i];
    h = ops::add_bias(g, ops::conv1d(g, h, p.conv_w[i], stride), p.conv_b[i]);
    trace_shape(trace, "conv" + std::to_string(i + 1), h.shape());
    h = ops::leaky_relu(g, h, slope);
    if (cfg.conditioning == Conditioning::scale) h = apply_label_scale(g, h, onehot, p.scale_embed[i]);
    trace_shape(trace, "lrelu", h.shape());
    if (i + 1 < k && shuffle_rng != nullptr && cfg.phase_shuffle > 0) {
      h = phase_shuffle(g, h, cfg.phase_shuffle, *shuffle_rng);
      trace_shape(trace, "phase_shuffle", h.shape());
    }
  }
  h = ops::reshape(g, h, Shape{n, cfg.base_length * cfg.top_channels()});
  trace_shape(trace, "reshape", h.shape());
  h = ops::dense(g, h, p.dense_w, p.dense_b);
  trace_shape(trace, "dense", h.shape());
  return h;
}

#define CWAVEGAN_NETWORKS(T)                                                                   \
  template struct GeneratorParams<T>;                                                          \
  template struct DiscriminatorParams<T>;                                                      \
  template GeneratorParams<T> build_generator<T>(const ModelConfig&, Rng&);                    \
  template DiscriminatorParams<T> build_discriminator<T>(const ModelConfig&, Rng&);            \
  template Tensor<T> generator_forward<T>(Graph<T>&, const GeneratorParams<T>&,                \
                                          const Tensor<T>&, std::span<const int>,              \
                                          const ModelConfig&, LayerTrace*);                    \
  template Tensor<T> discriminator_forward<T>(Graph<T>&, const DiscriminatorParams<T>&,        \
                                              const Tensor<T>&, std::span<const int>,          \
                                              const ModelConfig&, Rng*, LayerTrace*);

CWAVEGAN_NETWORKS(float)
CWAVEGAN_NETWORKS(double)

}  // namespace cwavegan
