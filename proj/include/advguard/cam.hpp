#pragma once

#include "advguard/net.hpp"
#include "advguard/tensor.hpp"

namespace advguard {

struct SaliencyMap {
  Tensor coarse;  // [H,W] channel sum at last-conv resolution
  Tensor fine;    // bilinear upsample at input resolution
  int argmax_y = 0;
  int argmax_x = 0;  // coarse-grid argmax cell
};

struct CropConfig {
  double alpha = 0.8;      // keep cells with fine saliency >= alpha * max
  double min_frac = 0.125; // minimum crop side as a fraction of the input side
};

struct CropRegion {
  int top = 0, left = 0, height = 0, width = 0;
  Tensor patch;  // [C,h,w] slice of the input
};

// Unweighted channel sum of the last-conv stack, plus its upsampled copy.
SaliencyMap saliency(const ActivationTrace& trace, int input_h, int input_w);

// Thresholded bounding box of the fine map, expanded to the minimum side and
// clipped to bounds. All-zero saliency is an error the caller treats as
// suspicious.
CropRegion locate_and_crop(const Tensor& x, const SaliencyMap& map,
                           const CropConfig& cfg);

}  // namespace advguard
