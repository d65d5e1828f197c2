#include "ref_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace advguard::ref {

namespace {

// Materialize the zero-padded input; keeps the conv loop trivial.
Tensor pad_input(const Tensor& x, int pad) {
  if (pad == 0) return x;
  Tensor out({x.shape[0], x.shape[1] + 2 * pad, x.shape[2] + 2 * pad});
  for (int c = 0; c < x.shape[0]; ++c)
    for (int y = 0; y < x.shape[1]; ++y)
      for (int xx = 0; xx < x.shape[2]; ++xx)
        out.at(c, y + pad, xx + pad) = x.at(c, y, xx);
  return out;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  const Tensor xp = pad_input(x, pad);
  const int oc = w.shape[0], ic = w.shape[1], kh = w.shape[2], kw = w.shape[3];
  const int oh = (xp.shape[1] - kh) / stride + 1;
  const int ow = (xp.shape[2] - kw) / stride + 1;
  Tensor y({oc, oh, ow});
  for (int o = 0; o < oc; ++o)
    for (int py = 0; py < oh; ++py)
      for (int px = 0; px < ow; ++px) {
        double acc = b.data.empty() ? 0.0 : b.data[(size_t)o];
        for (int c = 0; c < ic; ++c)
          for (int ky = 0; ky < kh; ++ky)
            for (int kx = 0; kx < kw; ++kx)
              acc += (double)xp.at(c, py * stride + ky, px * stride + kx) *
                     (double)w.data[((static_cast<size_t>(o) * ic + c) * kh + ky) * kw + kx];
        y.at(o, py, px) = static_cast<float>(acc);
      }
  return y;
}

Tensor maxpool(const Tensor& x, int kh, int kw, int stride) {
  const int oh = (x.shape[1] - kh) / stride + 1;
  const int ow = (x.shape[2] - kw) / stride + 1;
  Tensor y({x.shape[0], oh, ow});
  for (int c = 0; c < x.shape[0]; ++c)
    for (int py = 0; py < oh; ++py)
      for (int px = 0; px < ow; ++px) {
        float best = -std::numeric_limits<float>::infinity();
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx)
            best = std::max(best, x.at(c, py * stride + ky, px * stride + kx));
        y.at(c, py, px) = best;
      }
  return y;
}

Tensor avgpool(const Tensor& x, int kh, int kw, int stride) {
  const int oh = (x.shape[1] - kh) / stride + 1;
  const int ow = (x.shape[2] - kw) / stride + 1;
  Tensor y({x.shape[0], oh, ow});
  for (int c = 0; c < x.shape[0]; ++c)
    for (int py = 0; py < oh; ++py)
      for (int px = 0; px < ow; ++px) {
        double acc = 0;
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx)
            acc += x.at(c, py * stride + ky, px * stride + kx);
        y.at(c, py, px) = static_cast<float>(acc / (kh * kw));
      }
  return y;
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int out = w.shape[0], in = w.shape[1];
  Tensor y({out});
  for (int o = 0; o < out; ++o) {
    double acc = b.data.empty() ? 0.0 : b.data[(size_t)o];
    for (int i = 0; i < in; ++i)
      acc += (double)w.data[static_cast<size_t>(o) * in + i] * (double)x.data[(size_t)i];
    y.data[(size_t)o] = static_cast<float>(acc);
  }
  return y;
}

Tensor relu(const Tensor& x) {
  Tensor y(x.shape);
  for (size_t i = 0; i < x.numel(); ++i) y.data[i] = std::max(0.f, x.data[i]);
  return y;
}

Tensor softmax(const Tensor& x) {
  Tensor y(x.shape);
  float mx = *std::max_element(x.data.begin(), x.data.end());
  double sum = 0;
  for (size_t i = 0; i < x.numel(); ++i) sum += std::exp((double)x.data[i] - mx);
  for (size_t i = 0; i < x.numel(); ++i)
    y.data[i] = static_cast<float>(std::exp((double)x.data[i] - mx) / sum);
  return y;
}

}  // namespace advguard::ref
