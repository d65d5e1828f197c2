#include "advguard/attack.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "advguard/autodiff.hpp"

namespace advguard {

void apply_patch(Tensor& x, const Tensor& patch, int top, int left) {
  if (x.rank() != 3 || patch.rank() != 3 || patch.shape[0] != x.shape[0])
    fail(Errc::shape_mismatch, "patch and input disagree");
  if (top < 0 || left < 0 || top + patch.shape[1] > x.shape[1] ||
      left + patch.shape[2] > x.shape[2])
    fail(Errc::invalid_argument, "patch placement out of bounds");
  for (int c = 0; c < patch.shape[0]; ++c)
    for (int y = 0; y < patch.shape[1]; ++y)
      for (int xx = 0; xx < patch.shape[2]; ++xx)
        x.at(c, top + y, left + xx) = patch.at(c, y, xx);
}

namespace {

double mean_target_logit(const Model& m, const std::vector<Tensor>& probes,
                         int target) {
  const Objective obj = logit_objective(target);
  double acc = 0;
  for (const Tensor& p : probes) acc += objective_value(m, p, obj);
  return acc / static_cast<double>(probes.size());
}

}  // namespace

PatchResult forge_patch(const Model& m, const PatchSpec& spec,
                        const SampleSet& carriers) {
  if (carriers.empty()) fail(Errc::no_usable_input, "no carrier samples");
  if (spec.target < 0 || spec.target >= (int)m.spec.labels.size())
    fail(Errc::invalid_argument, "target class out of range");
  const int c = m.spec.input_shape[0];
  const int h = m.spec.input_shape[1];
  const int w = m.spec.input_shape[2];
  if (spec.side < 1 || spec.side > h || spec.side > w)
    fail(Errc::invalid_argument, "patch does not fit inside the input");
  const float lo = m.spec.input_lo, hi = m.spec.input_hi;

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> place_y(0, h - spec.side);
  std::uniform_int_distribution<int> place_x(0, w - spec.side);
  const int fixed_y = place_y(rng);
  const int fixed_x = place_x(rng);

  PatchResult res;
  res.patch = Tensor({c, spec.side, spec.side});
  for (float& v : res.patch.data) v = lo + 0.5f * (hi - lo);

  const Objective obj = logit_objective(spec.target);

  // probes with fixed placements measure progress
  std::vector<Tensor> probes;
  const int n_probes = std::min<int>(8, (int)carriers.size());
  std::vector<std::pair<int, int>> probe_pos(static_cast<size_t>(n_probes));
  for (auto& p : probe_pos) p = {place_y(rng), place_x(rng)};
  auto probe_set = [&]() {
    std::vector<Tensor> out;
    for (int i = 0; i < n_probes; ++i) {
      Tensor x = carriers.items[(size_t)i].x;
      apply_patch(x, res.patch, probe_pos[(size_t)i].first,
                  probe_pos[(size_t)i].second);
      out.push_back(std::move(x));
    }
    return out;
  };
  const double before = mean_target_logit(m, probe_set(), spec.target);

  const int batch = std::max(1, std::min<int>(spec.batch, (int)carriers.size()));
  std::uniform_int_distribution<int> pick(0, (int)carriers.size() - 1);

  for (int step = 0; step < spec.steps; ++step) {
    // draw the step's carriers and placements up front so the gradient sum
    // order is fixed
    std::vector<std::pair<int, std::pair<int, int>>> draws;
    draws.reserve(static_cast<size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      const int idx = pick(rng);
      const int py = spec.random_placement ? place_y(rng) : fixed_y;
      const int px = spec.random_placement ? place_x(rng) : fixed_x;
      draws.push_back({idx, {py, px}});
    }

    Tensor grad({c, spec.side, spec.side});
    for (const auto& [idx, pos] : draws) {
      Tensor x = carriers.items[(size_t)idx].x;
      apply_patch(x, res.patch, pos.first, pos.second);
      Tensor g = input_gradient(m, x, obj);
      for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < spec.side; ++y)
          for (int xx = 0; xx < spec.side; ++xx)
            grad.at(ch, y, xx) += g.at(ch, pos.first + y, pos.second + xx);
    }

    float gmax = 0.f;
    for (float v : grad.data) gmax = std::max(gmax, std::fabs(v));
    if (gmax == 0.f) continue;  // flat objective, nothing to do
    const float scale = static_cast<float>(spec.step_size) * (hi - lo) / gmax;
    for (size_t i = 0; i < grad.numel(); ++i)
      res.patch.data[i] += scale * grad.data[i];
    clamp_inplace(res.patch, lo, hi);
  }

  const double after = mean_target_logit(m, probe_set(), spec.target);
  res.gain = after - before;
  res.no_progress = res.gain < spec.min_gain;
  return res;
}

Tensor forge_noise(const Model& m, const Tensor& x, const NoiseAttackSpec& spec) {
  if (spec.epsilon < 0) fail(Errc::invalid_argument, "epsilon must be >= 0");
  const float lo = m.spec.input_lo, hi = m.spec.input_hi;
  for (float v : x.data)
    if (v < lo || v > hi) fail(Errc::invalid_argument, "input outside value box");

  const int klass = spec.targeted
                        ? spec.target
                        : argmax_index(forward(m, x, false).output);
  if (klass < 0 || klass >= (int)m.spec.labels.size())
    fail(Errc::invalid_argument, "attack class out of range");
  const Objective obj = cross_entropy_objective(klass);
  // untargeted climbs the loss of the current prediction, targeted descends
  // the loss of the target
  const float direction = spec.targeted ? -1.f : 1.f;

  const int iters = spec.kind == NoiseAttackSpec::Kind::fgsm
                        ? 1
                        : std::max(1, spec.iterations);
  const double step = spec.kind == NoiseAttackSpec::Kind::fgsm
                          ? spec.epsilon
                          : (spec.step > 0 ? spec.step : spec.epsilon / iters);
  const float eps = static_cast<float>(spec.epsilon);

  Tensor adv = x;
  for (int it = 0; it < iters; ++it) {
    Tensor g = input_gradient(m, adv, obj);
    const float s = direction * static_cast<float>(step);
    for (size_t i = 0; i < adv.numel(); ++i) {
      float v = adv.data[i] + s * (g.data[i] > 0.f ? 1.f : (g.data[i] < 0.f ? -1.f : 0.f));
      // project into the eps ball around x, then the value box
      v = std::clamp(v, x.data[i] - eps, x.data[i] + eps);
      adv.data[i] = std::clamp(v, lo, hi);
    }
  }
  return adv;
}

}  // namespace advguard
