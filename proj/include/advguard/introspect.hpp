#pragma once

#include <cstdint>
#include <vector>

#include "advguard/autodiff.hpp"
#include "advguard/net.hpp"

namespace advguard {

struct AmResult {
  Tensor pattern;              // input-shaped, clamped to the model's value box
  double mean_activation = 0;  // achieved spatial-mean activation of the neuron
  std::vector<double> history;
  bool no_progress = false;
};

// Gradient-ascent pattern for one (layer, channel) neuron. Init is seeded
// uniform noise in the middle half of the value box, so fixed seeds give
// identical patterns.
AmResult activation_maximization(const Model& m, int layer, int channel,
                                 const AscentConfig& cfg, uint64_t seed);

// Per-channel mean absolute activation over the last-conv stack: f[k].
std::vector<float> last_conv_distribution(const ActivationTrace& trace);

}  // namespace advguard
