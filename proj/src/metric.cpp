#include "advguard/metric.hpp"

#include <algorithm>
#include <cmath>

namespace advguard {

double activation_inconsistency(std::span<const float> f_pra,
                                std::span<const float> f_exp) {
  if (f_pra.size() != f_exp.size())
    fail(Errc::shape_mismatch, "distribution lengths differ");
  const size_t n = f_pra.size();
  if (n < 2) fail(Errc::invalid_argument, "need at least two channels");

  double mean_a = 0, mean_b = 0;
  for (size_t i = 0; i < n; ++i) {
    mean_a += f_pra[i];
    mean_b += f_exp[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double cov = 0, var_a = 0, var_b = 0;
  for (size_t i = 0; i < n; ++i) {
    const double da = f_pra[i] - mean_a;
    const double db = f_exp[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0)
    fail(Errc::constant_distribution, "zero-variance activation distribution");

  const double pcc = cov / std::sqrt(var_a * var_b);
  return std::clamp(1.0 - pcc, 0.0, 2.0);
}

}  // namespace advguard
