#pragma once

#include <optional>
#include <string>
#include <vector>

#include "advguard/tensor.hpp"

namespace advguard {

enum class LayerKind { conv2d, relu, maxpool2d, avgpool2d, dense, softmax, flatten };

const char* layer_kind_name(LayerKind k);
LayerKind layer_kind_from(const std::string& s);

struct LayerSpec {
  LayerKind kind{LayerKind::relu};
  // conv2d / pools
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  int padding = 0;
  // dense
  int in_features = 0;
  int out_features = 0;
  // blob ids into Model::blobs, -1 = none
  int weights = -1;
  int bias = -1;
};

struct Normalization {
  int axis = 0;  // tensor axis the mean/std vectors run along
  std::vector<float> mean{0.f};
  std::vector<float> std{1.f};
};

struct MfccConfig {
  int sample_rate = 16000;
  int frame_len = 400;  // 25 ms
  int hop = 160;        // 10 ms
  int fft_size = 512;
  int mel_filters = 40;
  int coefficients = 13;
  double pre_emphasis = 0.97;
  double log_floor = 1e-10;
};

struct NetworkSpec {
  std::string name;
  int format_version = 1;
  std::string modality = "image";  // "image" | "audio-mfcc"
  std::vector<int> input_shape;    // [C,H,W]
  float input_lo = 0.f;            // value box shared by attacks and AM
  float input_hi = 1.f;
  Normalization norm;
  std::vector<std::string> labels;
  std::vector<LayerSpec> layers;
  int last_conv = -1;  // flagged layer index
  std::optional<MfccConfig> mfcc;  // audio models carry their front-end
};

struct Model {
  NetworkSpec spec;
  std::vector<Tensor> blobs;
  // Index of the layer whose output is the last-conv activation stack
  // (the ReLU after the flagged conv when present). Set by validate_model.
  int last_conv_output = -1;
};

std::vector<int> layer_output_shape(const LayerSpec& l, const std::vector<int>& in);

// Shape-checks the whole layer chain, the label count, weight blob shapes,
// finiteness, and the last_conv flag. Fills Model::last_conv_output.
void validate_model(Model& m);

int last_conv_channels(const Model& m);

template <typename T>
struct ActivationTraceT {
  std::vector<TensorT<T>> outputs;  // post-activation output of every layer
  int last_conv_output = -1;

  const TensorT<T>& last_conv() const {
    if (last_conv_output < 0 || last_conv_output >= (int)outputs.size())
      fail(Errc::invalid_argument, "trace has no last-conv output");
    return outputs[static_cast<size_t>(last_conv_output)];
  }
};

using ActivationTrace = ActivationTraceT<float>;

template <typename T>
struct ForwardT {
  TensorT<T> output;
  ActivationTraceT<T> trace;  // empty unless requested
};

ForwardT<float> forward(const Model& m, const Tensor& x, bool want_trace = false);
// 64-bit shadow mode for gradient checking.
ForwardT<double> forward64(const Model& m, const DTensor& x, bool want_trace = false);

int argmax_index(const Tensor& logits);

}  // namespace advguard
