#include "advguard/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace advguard {

std::string shape_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

namespace {

void resize_plane(const float* src, int ih, int iw, float* dst, int oh, int ow) {
  const double sy_scale = static_cast<double>(ih) / oh;
  const double sx_scale = static_cast<double>(iw) / ow;
  for (int oy = 0; oy < oh; ++oy) {
    double sy = (oy + 0.5) * sy_scale - 0.5;
    sy = std::clamp(sy, 0.0, static_cast<double>(ih - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, ih - 1);
    const double wy = sy - y0;
    for (int ox = 0; ox < ow; ++ox) {
      double sx = (ox + 0.5) * sx_scale - 0.5;
      sx = std::clamp(sx, 0.0, static_cast<double>(iw - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, iw - 1);
      const double wx = sx - x0;
      const double top = src[y0 * iw + x0] * (1.0 - wx) + src[y0 * iw + x1] * wx;
      const double bot = src[y1 * iw + x0] * (1.0 - wx) + src[y1 * iw + x1] * wx;
      dst[oy * ow + ox] = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
}

void blur_plane(const float* src, int h, int w, const std::vector<double>& k,
                int r, float* tmp, float* dst) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) {
        const int sx = std::clamp(x + i, 0, w - 1);
        acc += k[static_cast<size_t>(i + r)] * src[y * w + sx];
      }
      tmp[y * w + x] = static_cast<float>(acc);
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) {
        const int sy = std::clamp(y + i, 0, h - 1);
        acc += k[static_cast<size_t>(i + r)] * tmp[sy * w + x];
      }
      dst[y * w + x] = static_cast<float>(acc);
    }
}

}  // namespace

Tensor resize_bilinear(const Tensor& x, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0)
    fail(Errc::invalid_argument, "resize target must be positive");
  if (x.rank() == 2) {
    Tensor out({out_h, out_w});
    resize_plane(x.data.data(), x.shape[0], x.shape[1], out.data.data(), out_h, out_w);
    return out;
  }
  if (x.rank() == 3) {
    Tensor out({x.shape[0], out_h, out_w});
    const size_t in_plane = static_cast<size_t>(x.shape[1]) * x.shape[2];
    const size_t out_plane = static_cast<size_t>(out_h) * out_w;
    for (int c = 0; c < x.shape[0]; ++c)
      resize_plane(x.data.data() + c * in_plane, x.shape[1], x.shape[2],
                   out.data.data() + c * out_plane, out_h, out_w);
    return out;
  }
  fail(Errc::shape_mismatch, "resize_bilinear expects rank 2 or 3");
}

Tensor gaussian_blur(const Tensor& x, double sigma) {
  if (sigma <= 0) fail(Errc::invalid_argument, "blur sigma must be positive");
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<size_t>(2 * r + 1));
  double sum = 0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<size_t>(i + r)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[static_cast<size_t>(i + r)];
  }
  for (double& v : k) v /= sum;

  const bool planar = x.rank() == 3;
  if (!planar && x.rank() != 2)
    fail(Errc::shape_mismatch, "gaussian_blur expects rank 2 or 3");
  const int c = planar ? x.shape[0] : 1;
  const int h = planar ? x.shape[1] : x.shape[0];
  const int w = planar ? x.shape[2] : x.shape[1];

  Tensor out(x.shape);
  std::vector<float> tmp(static_cast<size_t>(h) * w);
  const size_t plane = static_cast<size_t>(h) * w;
  for (int ci = 0; ci < c; ++ci)
    blur_plane(x.data.data() + ci * plane, h, w, k, r, tmp.data(),
               out.data.data() + ci * plane);
  return out;
}

}  // namespace advguard
