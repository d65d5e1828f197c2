#pragma once

// Naive serial reference kernels. Deliberately written as plain nested loops
// over an explicitly padded copy, independent of the OpenMP kernels in the
// main library. Tests compare the two; the benchmark measures the gap.

#include "advguard/tensor.hpp"

namespace advguard::ref {

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);
Tensor maxpool(const Tensor& x, int kh, int kw, int stride);
Tensor avgpool(const Tensor& x, int kh, int kw, int stride);
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor relu(const Tensor& x);
Tensor softmax(const Tensor& x);

}  // namespace advguard::ref
