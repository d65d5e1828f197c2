#pragma once

#include <string>
#include <vector>

#include "advguard/tensor.hpp"

namespace advguard {

struct SampleItem {
  std::string id;
  std::string label;        // empty = unlabeled
  bool adversarial = false; // set by the attack generator
  std::string attack;       // attack tag, e.g. "patch" or "fgsm:eps=0.05"
  Tensor x;                 // model-ready (resized + normalized) tensor
};

struct SampleSet {
  std::string modality = "image";  // "image" | "audio-mfcc"
  std::vector<SampleItem> items;

  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
};

// Order-independent content hash (XOR combine over items).
uint64_t sampleset_hash(const SampleSet& s);

}  // namespace advguard
