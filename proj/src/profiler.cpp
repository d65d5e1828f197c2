#include "advguard/profiler.hpp"

#include <algorithm>
#include <cmath>

#include "advguard/hash.hpp"
#include "advguard/introspect.hpp"
#include "advguard/metric.hpp"

namespace advguard {

namespace {

struct SampleFeatures {
  int predicted = -1;
  bool usable = false;
  std::vector<float> f;
  BinaryPattern pattern;  // image modality only
};

// Mean with summands accumulated in ascending order, so aggregation is
// independent of sample presentation order bit for bit.
float ordered_mean(std::vector<float>& vals) {
  std::sort(vals.begin(), vals.end());
  double acc = 0;
  for (float v : vals) acc += v;
  return static_cast<float>(acc / static_cast<double>(vals.size()));
}

}  // namespace

ProfileStore build_profiles(const Model& m, const SampleSet& calib,
                            const ProfilerConfig& cfg,
                            std::vector<std::string>* warnings) {
  if (calib.empty()) fail(Errc::no_usable_input, "calibration set is empty");
  const bool image = calib.modality == "image";
  const int n_items = static_cast<int>(calib.items.size());

  std::vector<SampleFeatures> feats(static_cast<size_t>(n_items));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_items; ++i) {
    const SampleItem& item = calib.items[static_cast<size_t>(i)];
    SampleFeatures& sf = feats[static_cast<size_t>(i)];
    try {
      auto fwd = forward(m, item.x, true);
      sf.predicted = argmax_index(fwd.output);
      sf.f = last_conv_distribution(fwd.trace);
      if (image) {
        SaliencyMap map = saliency(fwd.trace, item.x.shape[1], item.x.shape[2]);
        CropRegion crop = locate_and_crop(item.x, map, cfg.crop);
        sf.pattern = binarize_adaptive(fft2d_logmag(crop.patch, cfg.grid));
      }
      sf.usable = true;
    } catch (const std::exception&) {
      sf.usable = false;  // never lets an exception cross the omp region
    }
  }

  ProfileStore store;
  store.modality = calib.modality;
  store.grid = cfg.grid;
  store.channels = last_conv_channels(m);
  store.min_samples = cfg.min_samples;
  store.crop = cfg.crop;
  store.calib_hash = hex64(sampleset_hash(calib));

  for (size_t c = 0; c < m.spec.labels.size(); ++c) {
    const std::string& label = m.spec.labels[c];
    std::vector<int> members;
    for (int i = 0; i < n_items; ++i)
      if (feats[(size_t)i].usable && feats[(size_t)i].predicted == (int)c)
        members.push_back(i);

    if ((int)members.size() < cfg.min_samples) {
      if (warnings)
        warnings->push_back("class '" + label + "' skipped: " +
                            std::to_string(members.size()) + " usable samples < " +
                            std::to_string(cfg.min_samples));
      continue;
    }

    ClassProfile prof;
    prof.label = label;
    prof.n = static_cast<int>(members.size());

    const size_t k = feats[(size_t)members[0]].f.size();
    prof.f_exp.resize(k);
    std::vector<float> column(members.size());
    for (size_t j = 0; j < k; ++j) {
      for (size_t i = 0; i < members.size(); ++i)
        column[i] = feats[(size_t)members[i]].f[j];
      prof.f_exp[j] = ordered_mean(column);
    }

    if (image) {
      const int s = cfg.grid;
      prof.vote_ratio = Tensor({s, s});
      prof.p_exp = BinaryPattern(s);
      for (size_t cell = 0; cell < prof.vote_ratio.numel(); ++cell) {
        int votes = 0;
        for (int i : members) votes += feats[(size_t)i].pattern.bits[cell];
        const float ratio = static_cast<float>(votes) / prof.n;
        prof.vote_ratio.data[cell] = ratio;
        prof.p_exp.bits[cell] = ratio >= 0.5f ? 1 : 0;
      }
    }

    int labeled = 0, matching = 0;
    for (int i : members) {
      const SampleItem& item = calib.items[(size_t)i];
      if (!item.label.empty()) {
        ++labeled;
        if (item.label == label) ++matching;
      }
    }
    prof.purity = labeled > 0 ? static_cast<double>(matching) / labeled : 1.0;

    store.classes.emplace(label, std::move(prof));
  }

  if (store.classes.empty()) fail(Errc::no_usable_input, "no class reached min_samples");

  int dropped = 0;
  for (const auto& sf : feats) dropped += sf.usable ? 0 : 1;
  if (dropped > 0 && warnings)
    warnings->push_back(std::to_string(dropped) + " calibration samples unusable");
  return store;
}

std::vector<std::vector<double>> profile_distance_matrix(
    const ProfileStore& store, std::vector<std::string>* labels) {
  if (store.classes.size() < 2)
    fail(Errc::invalid_argument, "need at least two profiles");
  std::vector<const ClassProfile*> profs;
  for (const auto& [label, prof] : store.classes) {
    if (labels) labels->push_back(label);
    profs.push_back(&prof);
  }
  const size_t n = profs.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const double v = activation_inconsistency(profs[i]->f_exp, profs[j]->f_exp);
      d[i][j] = v;
      d[j][i] = v;
    }
  return d;
}

}  // namespace advguard
