#pragma once

#include <map>
#include <string>
#include <vector>

#include "advguard/cam.hpp"
#include "advguard/freq.hpp"
#include "advguard/net.hpp"
#include "advguard/sampleset.hpp"

namespace advguard {

struct ClassProfile {
  std::string label;
  int n = 0;           // samples aggregated
  double purity = 1.0; // fraction of labeled samples whose label matches
  std::vector<float> f_exp;  // mean last-conv distribution
  Tensor vote_ratio;         // [S,S] fraction voting true; empty for audio
  BinaryPattern p_exp;       // vote_ratio >= 0.5; empty for audio

  bool has_pattern() const { return p_exp.size > 0; }
};

struct ProfilerConfig {
  int min_samples = 20;
  int grid = 64;  // canonical frequency-pattern size
  CropConfig crop;
};

struct ProfileStore {
  int format_version = 1;
  std::string modality = "image";
  int grid = 64;
  int channels = 0;
  int min_samples = 20;
  CropConfig crop;  // detection reuses the profiling crop knobs
  std::string model_hash;
  std::string calib_hash;
  std::map<std::string, ClassProfile> classes;  // ordered by label

  const ClassProfile* find(const std::string& label) const {
    auto it = classes.find(label);
    return it == classes.end() ? nullptr : &it->second;
  }
};

// Builds per-class references, grouping calibration samples by the model's
// own predictions. Classes with fewer than min_samples usable samples are
// omitted with a warning.
ProfileStore build_profiles(const Model& m, const SampleSet& calib,
                            const ProfilerConfig& cfg,
                            std::vector<std::string>* warnings = nullptr);

// Pairwise activation inconsistency between class profiles; labels returned
// in store order.
std::vector<std::vector<double>> profile_distance_matrix(
    const ProfileStore& store, std::vector<std::string>* labels = nullptr);

}  // namespace advguard
