#pragma once

#include <filesystem>
#include <optional>

#include "advguard/net.hpp"
#include "advguard/profiler.hpp"
#include "advguard/report.hpp"
#include "advguard/sampleset.hpp"

namespace advguard {

struct DetectorOptions {
  Thresholds thresholds;
  // when set, upsampled saliency maps are dumped here as PGM
  std::optional<std::filesystem::path> dump_saliency;
};

// The self-verification stage: predict, locate, measure inconsistencies
// against the predicted class's profile, and flag. Metric errors downgrade
// the verdict to "suspicious" with a reason code instead of throwing.
DetectionReport classify_with_verification(const Model& m, const Tensor& x,
                                           const ProfileStore& store,
                                           const DetectorOptions& opt,
                                           const std::string& input_id);

// Parallel fan-out over items; report order always matches item order.
std::vector<DetectionReport> detect_batch(const Model& m, const SampleSet& samples,
                                          const ProfileStore& store,
                                          const DetectorOptions& opt);

}  // namespace advguard
