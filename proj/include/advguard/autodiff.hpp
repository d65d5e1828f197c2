#pragma once

#include <cstdint>
#include <vector>

#include "advguard/net.hpp"

namespace advguard {

// What the gradient is taken of. channel_mean reduces a channel's map to its
// spatial mean (an element, for rank-1 layers); logit picks one entry of the
// final output; cross_entropy is -log softmax(class) over the final logits
// (the inputs of a trailing softmax layer when the network has one).
struct Objective {
  enum class Kind { channel_mean, logit, cross_entropy };
  Kind kind = Kind::logit;
  int layer = -1;    // channel_mean only
  int channel = -1;  // channel_mean only
  int index = -1;    // logit / cross_entropy class
};

Objective channel_objective(int layer, int channel);
Objective logit_objective(int index);
Objective cross_entropy_objective(int klass);

// Gradient of the objective w.r.t. the input. Deterministic for fixed inputs.
Tensor input_gradient(const Model& m, const Tensor& x, const Objective& obj);
DTensor input_gradient64(const Model& m, const DTensor& x, const Objective& obj);

double objective_value(const Model& m, const Tensor& x, const Objective& obj);
double objective_value64(const Model& m, const DTensor& x, const Objective& obj);

struct AscentConfig {
  double eta = 0.1;
  int steps = 1;
  enum class Reg { none, semantic } reg = Reg::none;
  double l2_decay = 0.02;   // semantic only: x *= 1 - l2_decay each step
  int blur_every = 4;       // semantic only
  double blur_sigma = 0.8;  // semantic only
  bool clamp = false;       // clamp to [lo,hi] after each step
  float lo = 0.f;
  float hi = 1.f;
};

struct AscentResult {
  Tensor x;
  std::vector<double> history;  // objective before each step, plus final
  bool no_progress = false;     // final objective fell below the initial one
};

AscentResult gradient_ascent(const Model& m, const Tensor& x0, const Objective& obj,
                             const AscentConfig& cfg);

}  // namespace advguard
