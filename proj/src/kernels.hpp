#pragma once

// Layer kernels, templated on the scalar type. Every output element is
// written by exactly one thread and accumulated in a fixed order, so results
// are bit-identical for any thread count.

#include <algorithm>
#include <cmath>

#include "advguard/tensor.hpp"

namespace advguard::kernels {

template <typename T>
void conv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                    int stride, int pad, TensorT<T>& y) {
  const int ic = x.shape[0], ih = x.shape[1], iw = x.shape[2];
  const int oc = y.shape[0], oh = y.shape[1], ow = y.shape[2];
  const int kh = w.shape[2], kw = w.shape[3];
  const T* xp = x.data.data();
  const T* wp = w.data.data();
  T* yp = y.data.data();
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < oc; ++o) {
    for (int py = 0; py < oh; ++py) {
      const T* wo = wp + static_cast<size_t>(o) * ic * kh * kw;
      T* yrow = yp + (static_cast<size_t>(o) * oh + py) * ow;
      for (int px = 0; px < ow; ++px) {
        double acc = b.data.empty() ? 0.0 : static_cast<double>(b.data[static_cast<size_t>(o)]);
        for (int c = 0; c < ic; ++c) {
          const T* xc = xp + static_cast<size_t>(c) * ih * iw;
          const T* wc = wo + static_cast<size_t>(c) * kh * kw;
          for (int ky = 0; ky < kh; ++ky) {
            const int sy = py * stride + ky - pad;
            if (sy < 0 || sy >= ih) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int sx = px * stride + kx - pad;
              if (sx < 0 || sx >= iw) continue;
              acc += static_cast<double>(xc[static_cast<size_t>(sy) * iw + sx]) *
                     static_cast<double>(wc[ky * kw + kx]);
            }
          }
        }
        yrow[px] = static_cast<T>(acc);
      }
    }
  }
}

// Gradient w.r.t. the conv input, gather form (no write races).
template <typename T>
void conv2d_backward_input(const TensorT<T>& w, const TensorT<T>& dy,
                           int stride, int pad, TensorT<T>& dx) {
  const int ic = dx.shape[0], ih = dx.shape[1], iw = dx.shape[2];
  const int oc = dy.shape[0], oh = dy.shape[1], ow = dy.shape[2];
  const int kh = w.shape[2], kw = w.shape[3];
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < ic; ++c) {
    for (int sy = 0; sy < ih; ++sy) {
      for (int sx = 0; sx < iw; ++sx) {
        double acc = 0.0;
        for (int o = 0; o < oc; ++o) {
          for (int ky = 0; ky < kh; ++ky) {
            const int ny = sy + pad - ky;
            if (ny < 0 || ny % stride != 0) continue;
            const int py = ny / stride;
            if (py >= oh) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int nx = sx + pad - kx;
              if (nx < 0 || nx % stride != 0) continue;
              const int px = nx / stride;
              if (px >= ow) continue;
              acc += static_cast<double>(
                         w.data[((static_cast<size_t>(o) * ic + c) * kh + ky) * kw + kx]) *
                     static_cast<double>(dy.at(o, py, px));
            }
          }
        }
        dx.at(c, sy, sx) = static_cast<T>(acc);
      }
    }
  }
}

template <typename T>
void relu_forward(const TensorT<T>& x, TensorT<T>& y) {
  const size_t n = x.numel();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i)
    y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
}

template <typename T>
void relu_backward(const TensorT<T>& x, const TensorT<T>& dy, TensorT<T>& dx) {
  const size_t n = x.numel();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i)
    dx.data[i] = x.data[i] > T(0) ? dy.data[i] : T(0);
}

template <typename T>
void maxpool_forward(const TensorT<T>& x, int kh, int kw, int stride, TensorT<T>& y) {
  const int c0 = x.shape[0], ih = x.shape[1], iw = x.shape[2];
  const int oh = y.shape[1], ow = y.shape[2];
  (void)c0;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < y.shape[0]; ++c) {
    for (int py = 0; py < oh; ++py) {
      for (int px = 0; px < ow; ++px) {
        T best = x.at(c, py * stride, px * stride);
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int sy = py * stride + ky, sx = px * stride + kx;
            if (sy < ih && sx < iw) best = std::max(best, x.at(c, sy, sx));
          }
        y.at(c, py, px) = best;
      }
    }
  }
}

// Ties go to the first (row-major) maximal element. Channels are
// independent, so parallelism over channels is race-free even with
// overlapping windows.
template <typename T>
void maxpool_backward(const TensorT<T>& x, const TensorT<T>& dy, int kh, int kw,
                      int stride, TensorT<T>& dx) {
  const int ih = x.shape[1], iw = x.shape[2];
  const int oh = dy.shape[1], ow = dy.shape[2];
  std::fill(dx.data.begin(), dx.data.end(), T(0));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < x.shape[0]; ++c) {
    for (int py = 0; py < oh; ++py) {
      for (int px = 0; px < ow; ++px) {
        int by = py * stride, bx = px * stride;
        T best = x.at(c, by, bx);
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int sy = py * stride + ky, sx = px * stride + kx;
            if (sy < ih && sx < iw && x.at(c, sy, sx) > best) {
              best = x.at(c, sy, sx);
              by = sy;
              bx = sx;
            }
          }
        dx.at(c, by, bx) += dy.at(c, py, px);
      }
    }
  }
}

template <typename T>
void avgpool_forward(const TensorT<T>& x, int kh, int kw, int stride, TensorT<T>& y) {
  const int ih = x.shape[1], iw = x.shape[2];
  const int oh = y.shape[1], ow = y.shape[2];
  const double inv = 1.0 / (kh * kw);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < y.shape[0]; ++c) {
    for (int py = 0; py < oh; ++py) {
      for (int px = 0; px < ow; ++px) {
        double acc = 0.0;
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int sy = py * stride + ky, sx = px * stride + kx;
            if (sy < ih && sx < iw) acc += x.at(c, sy, sx);
          }
        y.at(c, py, px) = static_cast<T>(acc * inv);
      }
    }
  }
}

template <typename T>
void avgpool_backward(const TensorT<T>& dy, int kh, int kw, int stride, TensorT<T>& dx) {
  const int ih = dx.shape[1], iw = dx.shape[2];
  const int oh = dy.shape[1], ow = dy.shape[2];
  const T inv = T(1) / static_cast<T>(kh * kw);
  std::fill(dx.data.begin(), dx.data.end(), T(0));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < dx.shape[0]; ++c) {
    for (int py = 0; py < oh; ++py) {
      for (int px = 0; px < ow; ++px) {
        const T g = dy.at(c, py, px) * inv;
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int sy = py * stride + ky, sx = px * stride + kx;
            if (sy < ih && sx < iw) dx.at(c, sy, sx) += g;
          }
      }
    }
  }
}

template <typename T>
void dense_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                   TensorT<T>& y) {
  const int in = x.shape[0], out = y.shape[0];
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out; ++o) {
    double acc = b.data.empty() ? 0.0 : static_cast<double>(b.data[static_cast<size_t>(o)]);
    const T* row = w.data.data() + static_cast<size_t>(o) * in;
    for (int i = 0; i < in; ++i)
      acc += static_cast<double>(row[i]) * static_cast<double>(x.data[static_cast<size_t>(i)]);
    y.data[static_cast<size_t>(o)] = static_cast<T>(acc);
  }
}

template <typename T>
void dense_backward_input(const TensorT<T>& w, const TensorT<T>& dy, TensorT<T>& dx) {
  const int in = dx.shape[0], out = dy.shape[0];
#pragma omp parallel for schedule(static)
  for (int i = 0; i < in; ++i) {
    double acc = 0.0;
    for (int o = 0; o < out; ++o)
      acc += static_cast<double>(w.data[static_cast<size_t>(o) * in + i]) *
             static_cast<double>(dy.data[static_cast<size_t>(o)]);
    dx.data[static_cast<size_t>(i)] = static_cast<T>(acc);
  }
}

template <typename T>
void softmax_forward(const TensorT<T>& x, TensorT<T>& y) {
  T mx = x.data[0];
  for (T v : x.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (size_t i = 0; i < x.numel(); ++i) {
    const double e = std::exp(static_cast<double>(x.data[i]) - static_cast<double>(mx));
    y.data[i] = static_cast<T>(e);
    sum += e;
  }
  for (T& v : y.data) v = static_cast<T>(v / sum);
}

template <typename T>
void softmax_backward(const TensorT<T>& y, const TensorT<T>& dy, TensorT<T>& dx) {
  double dot = 0.0;
  for (size_t i = 0; i < y.numel(); ++i)
    dot += static_cast<double>(dy.data[i]) * static_cast<double>(y.data[i]);
  for (size_t i = 0; i < y.numel(); ++i)
    dx.data[i] = static_cast<T>(static_cast<double>(y.data[i]) *
                                (static_cast<double>(dy.data[i]) - dot));
}

}  // namespace advguard::kernels
