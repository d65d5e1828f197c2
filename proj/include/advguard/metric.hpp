#pragma once

#include <span>
#include <vector>

#include "advguard/errors.hpp"

namespace advguard {

struct Thresholds {
  double semantic = 0.46;
  double activation = 0.11;
};

// 1 - Pearson correlation with population moments; range [0,2]. Fails with
// constant_distribution when either vector has zero variance.
double activation_inconsistency(std::span<const float> f_pra,
                                std::span<const float> f_exp);

}  // namespace advguard
