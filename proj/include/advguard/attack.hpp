#pragma once

#include <cstdint>
#include <vector>

#include "advguard/net.hpp"
#include "advguard/sampleset.hpp"

namespace advguard {

struct PatchSpec {
  int side = 8;
  int target = 0;           // target class index
  bool random_placement = true;  // during optimization
  int steps = 500;
  double step_size = 0.05;  // applied to the max-normalized gradient
  uint64_t seed = 1;
  double min_gain = 1e-3;   // objective gain below this sets no_progress
  int batch = 4;            // carriers averaged per step
};

struct PatchResult {
  Tensor patch;  // [C, side, side], clamped to the model's value box
  bool no_progress = false;
  double gain = 0;  // mean target logit after minus before, over probes
};

// Gradient ascent on the mean target-class logit over carrier images with
// re-randomized placement each step.
PatchResult forge_patch(const Model& m, const PatchSpec& spec,
                        const SampleSet& carriers);

// Overwrites the patch rectangle; everything else is untouched.
void apply_patch(Tensor& x, const Tensor& patch, int top, int left);

struct NoiseAttackSpec {
  enum class Kind { fgsm, bim } kind = Kind::fgsm;
  double epsilon = 0.1;  // max-norm budget
  int iterations = 1;    // bim
  double step = 0;       // bim per-step size; 0 = epsilon / iterations
  bool targeted = false;
  int target = -1;  // targeted only
};

// FGSM / BIM on the model-ready tensor; the max-norm bound holds exactly and
// iterates stay inside the model's value box.
Tensor forge_noise(const Model& m, const Tensor& x, const NoiseAttackSpec& spec);

}  // namespace advguard
