#include "advguard/introspect.hpp"

#include <cmath>
#include <random>

namespace advguard {

AmResult activation_maximization(const Model& m, int layer, int channel,
                                 const AscentConfig& cfg, uint64_t seed) {
  const float lo = m.spec.input_lo, hi = m.spec.input_hi;
  const float span = hi - lo;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> init(lo + 0.25f * span, lo + 0.75f * span);

  Tensor x0(m.spec.input_shape);
  for (float& v : x0.data) v = init(rng);

  AscentConfig run = cfg;
  run.clamp = true;
  run.lo = lo;
  run.hi = hi;

  const Objective obj = channel_objective(layer, channel);
  AscentResult asc = gradient_ascent(m, x0, obj, run);

  AmResult res;
  res.pattern = std::move(asc.x);
  res.history = std::move(asc.history);
  res.no_progress = asc.no_progress;
  res.mean_activation = res.history.back();
  return res;
}

std::vector<float> last_conv_distribution(const ActivationTrace& trace) {
  const Tensor& stack = trace.last_conv();
  if (stack.rank() != 3) fail(Errc::shape_mismatch, "last-conv stack must be rank 3");
  const int k = stack.shape[0];
  const size_t plane = static_cast<size_t>(stack.shape[1]) * stack.shape[2];
  std::vector<float> f(static_cast<size_t>(k));
  for (int c = 0; c < k; ++c) {
    double acc = 0;
    const float* p = stack.data.data() + c * plane;
    for (size_t i = 0; i < plane; ++i) acc += std::fabs(static_cast<double>(p[i]));
    f[static_cast<size_t>(c)] = static_cast<float>(acc / static_cast<double>(plane));
  }
  return f;
}

}  // namespace advguard
