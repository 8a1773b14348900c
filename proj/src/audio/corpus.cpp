#include <algorithm>
#include <cmath>
#include <numbers>

#include "cwavegan/audio.hpp"

namespace cwavegan {

namespace fs = std::filesystem;

NormalizedClip normalize_length(std::span<const float> samples, std::size_t length,
                                float threshold) {
  if (length == 0) throw ConfigError("normalize_length: target length must be positive");
  NormalizedClip out;
  out.samples.assign(length, 0.0f);
  std::size_t first = 0;
  std::size_t last = samples.size();
  while (first < last && std::abs(samples[first]) < threshold) ++first;
  while (last > first && std::abs(samples[last - 1]) < threshold) --last;
  if (first == last) {
    out.all_silent = true;
    return out;
  }
  const std::size_t voiced = last - first;
  if (voiced >= length) {
    const std::size_t start = first + (voiced - length) / 2;
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), length, out.samples.begin());
  } else {
    const std::size_t left = (length - voiced) / 2;
    std::copy(samples.begin() + static_cast<std::ptrdiff_t>(first),
              samples.begin() + static_cast<std::ptrdiff_t>(last),
              out.samples.begin() + static_cast<std::ptrdiff_t>(left));
  }
  return out;
}

Corpus load_corpus(const fs::path& root, std::size_t length, float threshold) {
  if (!fs::is_directory(root)) throw ConfigError("corpus root " + root.string() + " is not a directory");
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (class_dirs.empty()) throw ConfigError("corpus root " + root.string() + " has no class directories");

  Corpus corpus;
  corpus.length = length;
  for (std::size_t label = 0; label < class_dirs.size(); ++label) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[label])) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext == ".wav") files.push_back(entry.path());
    }
    if (files.empty()) {
      throw ConfigError("class directory '" + class_dirs[label].filename().string() +
                        "' contains no .wav files");
    }
    std::sort(files.begin(), files.end());
    corpus.class_names.push_back(class_dirs[label].filename().string());
    for (const fs::path& file : files) {
      const WavData wav = load_wav(file);
      NormalizedClip clip = normalize_length(wav.samples, length, threshold);
      if (clip.all_silent) ++corpus.silent_clips;
      corpus.clips.push_back({std::move(clip.samples), static_cast<int>(label), file.string()});
    }
  }
  return corpus;
}

double synth_period(std::size_t label, std::uint32_t sample_rate) {
  return static_cast<double>(sample_rate) / (220.0 * static_cast<double>(label + 1));
}

Corpus synth_corpus(std::size_t num_classes, std::size_t per_class, std::size_t length, Rng& rng,
                    std::uint32_t sample_rate) {
  if (num_classes == 0 || per_class == 0 || length == 0) {
    throw ConfigError("synth_corpus: classes, clips per class and length must be positive");
  }
  Corpus corpus;
  corpus.length = length;
  for (std::size_t k = 0; k < num_classes; ++k) {
    corpus.class_names.push_back("tone" + std::to_string(k));
    const double period = synth_period(k, sample_rate);
    for (std::size_t i = 0; i < per_class; ++i) {
      const double phase = 2.0 * std::numbers::pi * rng.uniform01();
      AudioClip clip;
      clip.label = static_cast<int>(k);
      clip.source = "synth:class=" + std::to_string(k) + ",index=" + std::to_string(i);
      clip.samples.resize(length);
      for (std::size_t t = 0; t < length; ++t) {
        clip.samples[t] = static_cast<float>(
            0.8 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase));
      }
      corpus.clips.push_back(std::move(clip));
    }
  }
  return corpus;
}

BatchIterator::BatchIterator(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed)
    : corpus_(&corpus), batch_size_(batch_size), seed_(seed) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (corpus.clips.size() < batch_size) {
    throw ConfigError("corpus has " + std::to_string(corpus.clips.size()) +
                      " clips, fewer than batch size " + std::to_string(batch_size));
  }
  batches_per_epoch_ = corpus.clips.size() / batch_size;
  order_ = epoch_order(0);
}

std::vector<std::size_t> BatchIterator::epoch_order(std::uint64_t epoch) const {
  std::vector<std::size_t> order(corpus_->clips.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed_, epoch);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

void BatchIterator::seek(std::uint64_t epoch, std::uint64_t cursor) {
  if (cursor > batches_per_epoch_) throw InputError("batch cursor beyond end of epoch");
  if (epoch != epoch_) order_ = epoch_order(epoch);
  epoch_ = epoch;
  cursor_ = cursor;
}

Batch BatchIterator::next() {
  if (cursor_ == batches_per_epoch_) seek(epoch_ + 1, 0);
  const std::size_t len = corpus_->length;
  Batch batch;
  batch.samples = Tensor<float>(Shape{batch_size_, len, 1});
  batch.labels.reserve(batch_size_);
  auto dst = batch.samples.mutable_values();
  for (std::size_t b = 0; b < batch_size_; ++b) {
    const AudioClip& clip = corpus_->clips[order_[cursor_ * batch_size_ + b]];
    std::copy(clip.samples.begin(), clip.samples.end(), dst.begin() + static_cast<std::ptrdiff_t>(b * len));
    batch.labels.push_back(clip.label);
  }
  ++cursor_;
  return batch;
}

}  // namespace cwavegan
