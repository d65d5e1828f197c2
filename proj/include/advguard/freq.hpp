#pragma once

#include <cstdint>
#include <vector>

#include "advguard/tensor.hpp"

namespace advguard {

// Canonical binarized frequency pattern on an S x S grid, center = DC.
struct BinaryPattern {
  int size = 0;
  std::vector<uint8_t> bits;  // row-major, 0/1

  BinaryPattern() = default;
  explicit BinaryPattern(int s) : size(s), bits(static_cast<size_t>(s) * s, 0) {}
  size_t count_true() const;
  bool get(int y, int x) const { return bits[static_cast<size_t>(y) * size + x] != 0; }
  void set(int y, int x, bool v) { bits[static_cast<size_t>(y) * size + x] = v ? 1 : 0; }
};

// Channel-mean grayscale of a [C,H,W] crop (identity for [H,W]).
Tensor to_gray(const Tensor& x);

// Unnormalized 2D DFT magnitude, quadrants swapped so DC sits at (S/2,S/2).
Tensor fft2d_centered_mag(const Tensor& gray);

// Full crop pipeline: gray -> resize to grid x grid -> DFT -> shift ->
// log(1+|F|).
Tensor fft2d_logmag(const Tensor& crop, int grid = 64);

// Otsu threshold over a 256-bin histogram; returns the value mapped back to
// the grid's range. Fails with degenerate_spectrum on an all-equal grid.
double otsu_threshold(const Tensor& grid);

BinaryPattern binarize_adaptive(const Tensor& grid);

// 1 - Jaccard similarity over true cells; empty union is an error.
double semantic_inconsistency(const BinaryPattern& a, const BinaryPattern& b);

}  // namespace advguard
