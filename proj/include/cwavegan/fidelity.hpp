#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cwavegan/audio.hpp"

namespace cwavegan {

/// |FFT|^2 of a real clip, bins 0..N/2.
std::vector<double> power_spectrum(std::span<const float> samples);

/// Nearest-prototype classifier over per-class mean power spectra, scored by
/// cosine similarity.
class SpectralPrototypes {
 public:
  explicit SpectralPrototypes(const Corpus& real);

  int classify(std::span<const float> samples) const;
  std::size_t num_classes() const noexcept { return prototypes_.size(); }
  const std::vector<double>& prototype(std::size_t label) const { return prototypes_.at(label); }

 private:
  std::vector<std::vector<double>> prototypes_;
};

struct FidelityReport {
  std::vector<double> per_class;   // accuracy per requested label
  std::vector<std::size_t> counts;  // clips classified per label
  double overall = 0;
};

/// Produces `count` clips for `label`.
using ClipSource = std::function<std::vector<std::vector<float>>(int label, std::size_t count)>;

/// Generates n_per_class clips for every class of `real` and reports how
/// often the prototype classifier recovers the requested label.
FidelityReport evaluate_fidelity(const Corpus& real, const ClipSource& generate,
                                 std::size_t n_per_class);

}  // namespace cwavegan
