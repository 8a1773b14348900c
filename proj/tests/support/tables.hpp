#pragma once

// Layer-by-layer output shapes of the default architecture, transcribed row
// by row from the generator and discriminator tables.

#include <cstddef>
#include <iostream>

#include "cwavegan/model.hpp"

namespace tables {

using cwavegan::LayerShape;
using cwavegan::LayerTrace;
using cwavegan::Shape;

inline LayerTrace generator(std::size_t n, std::size_t d, std::size_t c) {
  return {
      {"input", {n, 100}},
      {"dense", {n, 256 * d}},
      {"reshape", {n, 16, 16 * d}},
      {"relu", {n, 16, 16 * d}},
      {"trans_conv1", {n, 64, 8 * d}},
      {"relu", {n, 64, 8 * d}},
      {"trans_conv2", {n, 256, 4 * d}},
      {"relu", {n, 256, 4 * d}},
      {"trans_conv3", {n, 1024, 2 * d}},
      {"relu", {n, 1024, 2 * d}},
      {"trans_conv4", {n, 4096, d}},
      {"relu", {n, 4096, d}},
      {"trans_conv5", {n, 8192, c}},
      {"tanh", {n, 8192, c}},
  };
}

inline LayerTrace discriminator(std::size_t n, std::size_t d, std::size_t c) {
  return {
      {"input", {n, 8192, c}},
      {"conv1", {n, 4096, d}},
      {"lrelu", {n, 4096, d}},
      {"phase_shuffle", {n, 4096, d}},
      {"conv2", {n, 1024, 2 * d}},
      {"lrelu", {n, 1024, 2 * d}},
      {"phase_shuffle", {n, 1024, 2 * d}},
      {"conv3", {n, 256, 4 * d}},
      {"lrelu", {n, 256, 4 * d}},
      {"phase_shuffle", {n, 256, 4 * d}},
      {"conv4", {n, 64, 8 * d}},
      {"lrelu", {n, 64, 8 * d}},
      {"phase_shuffle", {n, 64, 8 * d}},
      {"conv5", {n, 16, 16 * d}},
      {"lrelu", {n, 16, 16 * d}},
      {"reshape", {n, 256 * d}},
      {"dense", {n, 1}},
  };
}

/// Exact row-by-row equality; prints the first mismatch.
inline bool same(const LayerTrace& got, const LayerTrace& want) {
  if (got.size() != want.size()) {
    std::cerr << "layer count " << got.size() << " != " << want.size() << "\n";
    return false;
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].name != want[i].name || got[i].shape != want[i].shape) {
      std::cerr << "row " << i << ": " << got[i].name << " " << cwavegan::shape_str(got[i].shape) << " != "
                << want[i].name << " " << cwavegan::shape_str(want[i].shape) << "\n";
      return false;
    }
  }
  return true;
}

}  // namespace tables
