#include "cwavegan/fidelity.hpp"

#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>

namespace cwavegan {

std::vector<double> power_spectrum(std::span<const float> samples) {
  if (samples.empty()) throw InputError("power_spectrum: empty clip");
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  std::vector<double> power(samples.size() / 2 + 1);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::norm(out[i]);
  return power;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

SpectralPrototypes::SpectralPrototypes(const Corpus& real) {
  if (real.num_classes() < 2) {
    throw ConfigError("fidelity evaluation needs at least 2 classes, corpus has " +
                      std::to_string(real.num_classes()));
  }
  prototypes_.assign(real.num_classes(), {});
  std::vector<std::size_t> counts(real.num_classes(), 0);
  for (const AudioClip& clip : real.clips) {
    const std::vector<double> p = power_spectrum(clip.samples);
    auto& proto = prototypes_[static_cast<std::size_t>(clip.label)];
    if (proto.empty()) proto.assign(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) proto[i] += p[i];
    ++counts[static_cast<std::size_t>(clip.label)];
  }
  for (std::size_t k = 0; k < prototypes_.size(); ++k) {
    if (counts[k] == 0) throw ConfigError("class " + real.class_names[k] + " has no clips");
    for (double& v : prototypes_[k]) v /= static_cast<double>(counts[k]);
  }
}

int SpectralPrototypes::classify(std::span<const float> samples) const {
  const std::vector<double> p = power_spectrum(samples);
  if (p.size() != prototypes_[0].size()) {
    throw DimensionError("classify: clip length does not match the prototype corpus");
  }
  int best = 0;
  double best_score = -1;
  for (std::size_t k = 0; k < prototypes_.size(); ++k) {
    const double s = cosine(p, prototypes_[k]);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

FidelityReport evaluate_fidelity(const Corpus& real, const ClipSource& generate,
                                 std::size_t n_per_class) {
  if (n_per_class == 0) throw ConfigError("n_per_class must be positive");
  const SpectralPrototypes prototypes(real);
  FidelityReport report;
  std::size_t hits_total = 0;
  for (std::size_t k = 0; k < prototypes.num_classes(); ++k) {
    const auto clips = generate(static_cast<int>(k), n_per_class);
    std::size_t hits = 0;
    for (const auto& clip : clips) hits += prototypes.classify(clip) == static_cast<int>(k);
    report.per_class.push_back(clips.empty() ? 0.0
                                             : static_cast<double>(hits) / static_cast<double>(clips.size()));
    report.counts.push_back(clips.size());
    hits_total += hits;
  }
  std::size_t total = 0;
  for (std::size_t c : report.counts) total += c;
  report.overall = total ? static_cast<double>(hits_total) / static_cast<double>(total) : 0.0;
  return report;
}

}  // namespace cwavegan
