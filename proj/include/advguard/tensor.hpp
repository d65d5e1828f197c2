#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "advguard/errors.hpp"

namespace advguard {

// Dense row-major tensor. float is the compute type everywhere; the double
// instantiation exists for gradient checking only.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), T(0));
  }
  TensorT(std::vector<int> s, std::vector<T> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (numel_of(shape) != data.size())
      fail(Errc::shape_mismatch, "tensor data length does not match shape");
  }

  static size_t numel_of(const std::vector<int>& s) {
    size_t n = 1;
    for (int e : s) {
      if (e <= 0) fail(Errc::shape_mismatch, "non-positive tensor extent");
      n *= static_cast<size_t>(e);
    }
    return n;
  }

  size_t numel() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  // rank-3 [C,H,W] access
  T& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
  }
  const T& at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
  }
  // rank-2 [H,W] access
  T& at(int y, int x) { return data[static_cast<size_t>(y) * shape[1] + x]; }
  const T& at(int y, int x) const {
    return data[static_cast<size_t>(y) * shape[1] + x];
  }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

using Tensor = TensorT<float>;
using DTensor = TensorT<double>;

template <typename T>
bool all_finite(const TensorT<T>& t) {
  for (T v : t.data)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return true;
}

template <typename T>
void require_finite(const TensorT<T>& t, const std::string& what) {
  if (!all_finite(t)) fail(Errc::non_finite, "non-finite values in " + what);
}

template <typename T>
void require_shape(const TensorT<T>& t, const std::vector<int>& shape,
                   const std::string& what) {
  if (t.shape != shape) fail(Errc::shape_mismatch, "unexpected shape for " + what);
}

template <typename T>
void clamp_inplace(TensorT<T>& t, T lo, T hi) {
  for (T& v : t.data) v = v < lo ? lo : (v > hi ? hi : v);
}

template <typename To, typename From>
TensorT<To> cast_tensor(const TensorT<From>& t) {
  TensorT<To> out(t.shape);
  for (size_t i = 0; i < t.data.size(); ++i)
    out.data[i] = static_cast<To>(t.data[i]);
  return out;
}

std::string shape_str(const std::vector<int>& s);

// Bilinear resize with half-pixel sample centers; works on [H,W] and [C,H,W].
Tensor resize_bilinear(const Tensor& x, int out_h, int out_w);

// Separable Gaussian blur, replicated edges; [H,W] or [C,H,W].
Tensor gaussian_blur(const Tensor& x, double sigma);

}  // namespace advguard
