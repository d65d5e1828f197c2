#include "advguard/cam.hpp"

#include <algorithm>
#include <cmath>

namespace advguard {

SaliencyMap saliency(const ActivationTrace& trace, int input_h, int input_w) {
  const Tensor& stack = trace.last_conv();
  if (stack.rank() != 3) fail(Errc::shape_mismatch, "last-conv stack must be rank 3");
  const int k = stack.shape[0], h = stack.shape[1], w = stack.shape[2];

  SaliencyMap map;
  map.coarse = Tensor({h, w});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int c = 0; c < k; ++c) acc += stack.at(c, y, x);
      map.coarse.at(y, x) = static_cast<float>(acc);
    }

  float best = map.coarse.data[0];
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (map.coarse.at(y, x) > best) {
        best = map.coarse.at(y, x);
        map.argmax_y = y;
        map.argmax_x = x;
      }

  map.fine = resize_bilinear(map.coarse, input_h, input_w);
  return map;
}

CropRegion locate_and_crop(const Tensor& x, const SaliencyMap& map,
                           const CropConfig& cfg) {
  if (x.rank() != 3) fail(Errc::shape_mismatch, "input must be [C,H,W]");
  const Tensor& fine = map.fine;
  if (fine.shape[0] != x.shape[1] || fine.shape[1] != x.shape[2])
    fail(Errc::shape_mismatch, "saliency map is not at input resolution");
  const int h = x.shape[1], w = x.shape[2];

  const float mx = *std::max_element(fine.data.begin(), fine.data.end());
  if (mx <= 0.f) fail(Errc::all_zero_saliency, "saliency map is all zero");

  const float thr = static_cast<float>(cfg.alpha) * mx;
  int top = h, left = w, bottom = -1, right = -1;
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx)
      if (fine.at(y, xx) >= thr) {
        top = std::min(top, y);
        left = std::min(left, xx);
        bottom = std::max(bottom, y);
        right = std::max(right, xx);
      }

  // Grow each side symmetrically about the box center to the floor, then
  // clip; a clipped box slides back inside instead of shrinking.
  auto expand = [](int lo, int hi, int min_side, int bound) {
    int side = hi - lo + 1;
    if (side < min_side) {
      const int grow = min_side - side;
      lo -= grow / 2;
      hi += grow - grow / 2;
    }
    if (lo < 0) {
      hi -= lo;
      lo = 0;
    }
    if (hi >= bound) {
      lo -= hi - (bound - 1);
      hi = bound - 1;
    }
    lo = std::max(lo, 0);
    return std::make_pair(lo, hi);
  };

  const int min_h = std::max(1, static_cast<int>(std::ceil(cfg.min_frac * h)));
  const int min_w = std::max(1, static_cast<int>(std::ceil(cfg.min_frac * w)));
  auto [t, b] = expand(top, bottom, min_h, h);
  auto [l, r] = expand(left, right, min_w, w);

  CropRegion region;
  region.top = t;
  region.left = l;
  region.height = b - t + 1;
  region.width = r - l + 1;
  region.patch = Tensor({x.shape[0], region.height, region.width});
  for (int c = 0; c < x.shape[0]; ++c)
    for (int y = 0; y < region.height; ++y)
      for (int xx = 0; xx < region.width; ++xx)
        region.patch.at(c, y, xx) = x.at(c, t + y, l + xx);
  return region;
}

}  // namespace advguard
