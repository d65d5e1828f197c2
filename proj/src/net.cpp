#include "advguard/net.hpp"

#include <algorithm>

#include "kernels.hpp"

namespace advguard {

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::avgpool2d: return "avgpool2d";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
    case LayerKind::flatten: return "flatten";
  }
  return "?";
}

LayerKind layer_kind_from(const std::string& s) {
  if (s == "conv2d") return LayerKind::conv2d;
  if (s == "relu") return LayerKind::relu;
  if (s == "maxpool2d") return LayerKind::maxpool2d;
  if (s == "avgpool2d") return LayerKind::avgpool2d;
  if (s == "dense") return LayerKind::dense;
  if (s == "softmax") return LayerKind::softmax;
  if (s == "flatten") return LayerKind::flatten;
  fail(Errc::bad_format, "unknown layer kind '" + s + "'");
}

std::vector<int> layer_output_shape(const LayerSpec& l, const std::vector<int>& in) {
  auto pool_extent = [](int n, int k, int s) { return (n - k) / s + 1; };
  switch (l.kind) {
    case LayerKind::conv2d: {
      if (in.size() != 3 || in[0] != l.in_channels)
        fail(Errc::shape_inconsistency, "conv2d input mismatch, got " + shape_str(in));
      const int oh = (in[1] + 2 * l.padding - l.kernel_h) / l.stride + 1;
      const int ow = (in[2] + 2 * l.padding - l.kernel_w) / l.stride + 1;
      if (oh <= 0 || ow <= 0)
        fail(Errc::shape_inconsistency, "conv2d output collapses to zero");
      return {l.out_channels, oh, ow};
    }
    case LayerKind::maxpool2d:
    case LayerKind::avgpool2d: {
      if (in.size() != 3)
        fail(Errc::shape_inconsistency, "pool needs rank-3 input");
      if (l.padding != 0) fail(Errc::shape_inconsistency, "pool padding unsupported");
      const int oh = pool_extent(in[1], l.kernel_h, l.stride);
      const int ow = pool_extent(in[2], l.kernel_w, l.stride);
      if (oh <= 0 || ow <= 0) fail(Errc::shape_inconsistency, "pool output collapses");
      return {in[0], oh, ow};
    }
    case LayerKind::relu:
      return in;
    case LayerKind::flatten: {
      int n = 1;
      for (int e : in) n *= e;
      return {n};
    }
    case LayerKind::dense: {
      if (in.size() != 1 || in[0] != l.in_features)
        fail(Errc::shape_inconsistency,
             "dense expects flat input of width " + std::to_string(l.in_features) +
                 ", got " + shape_str(in));
      return {l.out_features};
    }
    case LayerKind::softmax:
      if (in.size() != 1) fail(Errc::shape_inconsistency, "softmax needs rank-1 input");
      return in;
  }
  fail(Errc::invalid_argument, "unreachable layer kind");
}

void validate_model(Model& m) {
  const NetworkSpec& s = m.spec;
  if (s.input_shape.size() != 3)
    fail(Errc::shape_inconsistency, "input_shape must be [C,H,W]");
  if (s.layers.empty()) fail(Errc::shape_inconsistency, "network has no layers");

  std::vector<int> cur = s.input_shape;
  for (size_t i = 0; i < s.layers.size(); ++i) {
    const LayerSpec& l = s.layers[i];
    if (l.kind == LayerKind::conv2d) {
      if (l.weights < 0 || l.weights >= (int)m.blobs.size())
        fail(Errc::shape_inconsistency, "conv2d missing weight blob");
      require_shape(m.blobs[(size_t)l.weights],
                    {l.out_channels, l.in_channels, l.kernel_h, l.kernel_w},
                    "conv2d weights");
      if (l.bias >= 0)
        require_shape(m.blobs[(size_t)l.bias], {l.out_channels}, "conv2d bias");
    } else if (l.kind == LayerKind::dense) {
      if (l.weights < 0 || l.weights >= (int)m.blobs.size())
        fail(Errc::shape_inconsistency, "dense missing weight blob");
      require_shape(m.blobs[(size_t)l.weights], {l.out_features, l.in_features},
                    "dense weights");
      if (l.bias >= 0)
        require_shape(m.blobs[(size_t)l.bias], {l.out_features}, "dense bias");
    }
    cur = layer_output_shape(l, cur);
  }
  if (cur.size() != 1 || cur[0] != (int)s.labels.size())
    fail(Errc::shape_inconsistency, "label count does not match output width");
  for (const Tensor& b : m.blobs) require_finite(b, "model weights");

  // last_conv flag: the flagged layer is the final conv (or the pool right
  // after it); the recorded activation stack is taken post-ReLU.
  if (s.last_conv < 0 || s.last_conv >= (int)s.layers.size())
    fail(Errc::shape_inconsistency, "last_conv index out of range");
  const LayerSpec& lc = s.layers[(size_t)s.last_conv];
  bool ok = lc.kind == LayerKind::conv2d;
  if (!ok && (lc.kind == LayerKind::maxpool2d || lc.kind == LayerKind::avgpool2d) &&
      s.last_conv >= 1) {
    int p = s.last_conv - 1;
    if (s.layers[(size_t)p].kind == LayerKind::relu && p >= 1) p -= 1;
    ok = s.layers[(size_t)p].kind == LayerKind::conv2d;
  }
  if (!ok)
    fail(Errc::shape_inconsistency, "last_conv must flag a conv2d or its pool");
  m.last_conv_output = s.last_conv;
  if (s.last_conv + 1 < (int)s.layers.size() &&
      s.layers[(size_t)s.last_conv + 1].kind == LayerKind::relu)
    m.last_conv_output = s.last_conv + 1;
}

int last_conv_channels(const Model& m) {
  std::vector<int> cur = m.spec.input_shape;
  for (int i = 0; i <= m.last_conv_output; ++i)
    cur = layer_output_shape(m.spec.layers[(size_t)i], cur);
  if (cur.size() != 3)
    fail(Errc::shape_inconsistency, "last-conv output is not rank 3");
  return cur[0];
}

namespace {

template <typename T>
TensorT<T> blob_as(const Model& m, int id) {
  if (id < 0) return TensorT<T>();
  if constexpr (std::is_same_v<T, float>) {
    return m.blobs[(size_t)id];
  } else {
    return cast_tensor<T>(m.blobs[(size_t)id]);
  }
}

template <typename T>
ForwardT<T> forward_impl(const Model& m, const TensorT<T>& x, bool want_trace) {
  const NetworkSpec& s = m.spec;
  if (x.shape != s.input_shape)
    fail(Errc::shape_mismatch, "input shape " + shape_str(x.shape) +
                                   " does not match model " + shape_str(s.input_shape));
  require_finite(x, "network input");

  ForwardT<T> res;
  if (want_trace) {
    res.trace.outputs.reserve(s.layers.size());
    res.trace.last_conv_output = m.last_conv_output;
  }

  TensorT<T> cur = x;
  std::vector<int> shape = s.input_shape;
  for (const LayerSpec& l : s.layers) {
    std::vector<int> out_shape = layer_output_shape(l, shape);
    TensorT<T> out(out_shape);
    switch (l.kind) {
      case LayerKind::conv2d: {
        TensorT<T> w = blob_as<T>(m, l.weights);
        TensorT<T> b = blob_as<T>(m, l.bias);
        kernels::conv2d_forward(cur, w, b, l.stride, l.padding, out);
        break;
      }
      case LayerKind::relu:
        kernels::relu_forward(cur, out);
        break;
      case LayerKind::maxpool2d:
        kernels::maxpool_forward(cur, l.kernel_h, l.kernel_w, l.stride, out);
        break;
      case LayerKind::avgpool2d:
        kernels::avgpool_forward(cur, l.kernel_h, l.kernel_w, l.stride, out);
        break;
      case LayerKind::flatten:
        out.data = cur.data;
        break;
      case LayerKind::dense: {
        TensorT<T> w = blob_as<T>(m, l.weights);
        TensorT<T> b = blob_as<T>(m, l.bias);
        kernels::dense_forward(cur, w, b, out);
        break;
      }
      case LayerKind::softmax:
        kernels::softmax_forward(cur, out);
        break;
    }
    require_finite(out, std::string("output of ") + layer_kind_name(l.kind));
    if (want_trace) res.trace.outputs.push_back(out);
    cur = std::move(out);
    shape = std::move(out_shape);
  }
  res.output = std::move(cur);
  return res;
}

}  // namespace

ForwardT<float> forward(const Model& m, const Tensor& x, bool want_trace) {
  return forward_impl<float>(m, x, want_trace);
}

ForwardT<double> forward64(const Model& m, const DTensor& x, bool want_trace) {
  return forward_impl<double>(m, x, want_trace);
}

int argmax_index(const Tensor& logits) {
  return static_cast<int>(
      std::max_element(logits.data.begin(), logits.data.end()) - logits.data.begin());
}

}  // namespace advguard
