#include "advguard/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"

namespace advguard {

Objective channel_objective(int layer, int channel) {
  Objective o;
  o.kind = Objective::Kind::channel_mean;
  o.layer = layer;
  o.channel = channel;
  return o;
}

Objective logit_objective(int index) {
  Objective o;
  o.kind = Objective::Kind::logit;
  o.index = index;
  return o;
}

Objective cross_entropy_objective(int klass) {
  Objective o;
  o.kind = Objective::Kind::cross_entropy;
  o.index = klass;
  return o;
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

bool ends_with_softmax(const Model& m) {
  return m.spec.layers.back().kind == LayerKind::softmax;
}

ForwardT<float> forward_impl_trace(const Model& m, const TensorT<float>& x) {
  return forward(m, x, true);
}
ForwardT<double> forward_impl_trace(const Model& m, const TensorT<double>& x) {
  return forward64(m, x, true);
}

template <typename T>
void check_objective(const Model& m, const Objective& obj,
                     const ActivationTraceT<T>& trace) {
  const int L = (int)m.spec.layers.size();
  switch (obj.kind) {
    case Objective::Kind::channel_mean: {
      if (obj.layer < 0 || obj.layer >= L)
        fail(Errc::invalid_argument, "objective layer out of range");
      const auto& out = trace.outputs[(size_t)obj.layer];
      const int channels = out.rank() == 3 ? out.shape[0] : out.shape[0];
      if (obj.channel < 0 || obj.channel >= channels)
        fail(Errc::invalid_argument, "objective channel out of range");
      break;
    }
    case Objective::Kind::logit:
    case Objective::Kind::cross_entropy: {
      const int width = (int)trace.outputs.back().numel();
      if (obj.index < 0 || obj.index >= width)
        fail(Errc::invalid_argument, "objective index out of range");
      break;
    }
  }
}

// Softmax probabilities of the final logits; identity if the net already
// ends in softmax.
template <typename T>
TensorT<T> output_probs(const Model& m, const ActivationTraceT<T>& trace) {
  const TensorT<T>& out = trace.outputs.back();
  if (ends_with_softmax(m)) return out;
  TensorT<T> p(out.shape);
  kernels::softmax_forward(out, p);
  return p;
}

// Seed gradient at seed_layer's output and sweep to the input.
template <typename T>
TensorT<T> backward_sweep(const Model& m, const TensorT<T>& x,
                          const ActivationTraceT<T>& trace, int seed_layer,
                          TensorT<T> grad) {
  for (int li = seed_layer; li >= 0; --li) {
    const LayerSpec& l = m.spec.layers[(size_t)li];
    const TensorT<T>& input = li == 0 ? x : trace.outputs[(size_t)li - 1];
    TensorT<T> dx(input.shape);
    switch (l.kind) {
      case LayerKind::conv2d: {
        TensorT<T> w = blob_as<T>(m, l.weights);
        kernels::conv2d_backward_input(w, grad, l.stride, l.padding, dx);
        break;
      }
      case LayerKind::relu:
        kernels::relu_backward(input, grad, dx);
        break;
      case LayerKind::maxpool2d:
        kernels::maxpool_backward(input, grad, l.kernel_h, l.kernel_w, l.stride, dx);
        break;
      case LayerKind::avgpool2d:
        kernels::avgpool_backward(grad, l.kernel_h, l.kernel_w, l.stride, dx);
        break;
      case LayerKind::flatten:
        dx.data = grad.data;
        break;
      case LayerKind::dense: {
        TensorT<T> w = blob_as<T>(m, l.weights);
        kernels::dense_backward_input(w, grad, dx);
        break;
      }
      case LayerKind::softmax:
        kernels::softmax_backward(trace.outputs[(size_t)li], grad, dx);
        break;
    }
    grad = std::move(dx);
  }
  require_finite(grad, "input gradient");
  return grad;
}

template <typename T>
TensorT<T> input_gradient_impl(const Model& m, const TensorT<T>& x,
                               const Objective& obj) {
  auto fwd = forward_impl_trace(m, x);
  check_objective(m, obj, fwd.trace);
  const int L = (int)m.spec.layers.size();

  switch (obj.kind) {
    case Objective::Kind::channel_mean: {
      const TensorT<T>& out = fwd.trace.outputs[(size_t)obj.layer];
      TensorT<T> seed(out.shape);
      if (out.rank() == 3) {
        const T g = T(1) / static_cast<T>(out.shape[1] * out.shape[2]);
        for (int y = 0; y < out.shape[1]; ++y)
          for (int xx = 0; xx < out.shape[2]; ++xx) seed.at(obj.channel, y, xx) = g;
      } else {
        seed.data[(size_t)obj.channel] = T(1);
      }
      return backward_sweep(m, x, fwd.trace, obj.layer, std::move(seed));
    }
    case Objective::Kind::logit: {
      TensorT<T> seed(fwd.trace.outputs.back().shape);
      seed.data[(size_t)obj.index] = T(1);
      return backward_sweep(m, x, fwd.trace, L - 1, std::move(seed));
    }
    case Objective::Kind::cross_entropy: {
      // d(-log p_k)/d logits = p - onehot(k); seeded below the softmax so the
      // sweep stays numerically stable.
      TensorT<T> p = output_probs(m, fwd.trace);
      TensorT<T> seed(p.shape);
      for (size_t i = 0; i < p.numel(); ++i) seed.data[i] = p.data[i];
      seed.data[(size_t)obj.index] -= T(1);
      const int seed_layer = ends_with_softmax(m) ? L - 2 : L - 1;
      return backward_sweep(m, x, fwd.trace, seed_layer, std::move(seed));
    }
  }
  fail(Errc::invalid_argument, "unreachable objective kind");
}

template <typename T>
double objective_value_impl(const Model& m, const TensorT<T>& x, const Objective& obj) {
  auto fwd = forward_impl_trace(m, x);
  check_objective(m, obj, fwd.trace);
  switch (obj.kind) {
    case Objective::Kind::channel_mean: {
      const TensorT<T>& out = fwd.trace.outputs[(size_t)obj.layer];
      if (out.rank() == 3) {
        double acc = 0;
        for (int y = 0; y < out.shape[1]; ++y)
          for (int xx = 0; xx < out.shape[2]; ++xx) acc += out.at(obj.channel, y, xx);
        return acc / (out.shape[1] * out.shape[2]);
      }
      return static_cast<double>(out.data[(size_t)obj.channel]);
    }
    case Objective::Kind::logit:
      return static_cast<double>(fwd.trace.outputs.back().data[(size_t)obj.index]);
    case Objective::Kind::cross_entropy: {
      TensorT<T> p = output_probs(m, fwd.trace);
      const double pv =
          std::max(static_cast<double>(p.data[(size_t)obj.index]), 1e-300);
      return -std::log(pv);
    }
  }
  fail(Errc::invalid_argument, "unreachable objective kind");
}

}  // namespace

Tensor input_gradient(const Model& m, const Tensor& x, const Objective& obj) {
  return input_gradient_impl<float>(m, x, obj);
}

DTensor input_gradient64(const Model& m, const DTensor& x, const Objective& obj) {
  return input_gradient_impl<double>(m, x, obj);
}

double objective_value(const Model& m, const Tensor& x, const Objective& obj) {
  return objective_value_impl<float>(m, x, obj);
}

double objective_value64(const Model& m, const DTensor& x, const Objective& obj) {
  return objective_value_impl<double>(m, x, obj);
}

AscentResult gradient_ascent(const Model& m, const Tensor& x0, const Objective& obj,
                             const AscentConfig& cfg) {
  if (cfg.steps < 1) fail(Errc::invalid_argument, "ascent needs steps >= 1");
  if (cfg.eta <= 0) fail(Errc::invalid_argument, "ascent needs eta > 0");
  if (cfg.reg == AscentConfig::Reg::semantic && cfg.blur_every < 1)
    fail(Errc::invalid_argument, "blur_every must be >= 1");

  AscentResult res;
  res.x = x0;
  res.history.reserve((size_t)cfg.steps + 1);
  for (int step = 0; step < cfg.steps; ++step) {
    const double v = objective_value(m, res.x, obj);
    if (!std::isfinite(v)) fail(Errc::divergence, "objective became non-finite");
    res.history.push_back(v);
    Tensor g = input_gradient(m, res.x, obj);
    const float eta = static_cast<float>(cfg.eta);
    for (size_t i = 0; i < g.numel(); ++i) res.x.data[i] += eta * g.data[i];
    if (cfg.reg == AscentConfig::Reg::semantic) {
      const float keep = static_cast<float>(1.0 - cfg.l2_decay);
      for (float& v2 : res.x.data) v2 *= keep;
      if ((step + 1) % cfg.blur_every == 0 && res.x.rank() >= 2)
        res.x = gaussian_blur(res.x, cfg.blur_sigma);
    }
    if (cfg.clamp) clamp_inplace(res.x, cfg.lo, cfg.hi);
    require_finite(res.x, "ascent iterate");
  }
  const double final_v = objective_value(m, res.x, obj);
  if (!std::isfinite(final_v)) fail(Errc::divergence, "objective became non-finite");
  res.history.push_back(final_v);
  res.no_progress = final_v < res.history.front();
  return res;
}

}  // namespace advguard
