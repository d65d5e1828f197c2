#pragma once

#include <cstdint>
#include <filesystem>

#include "advguard/net.hpp"

namespace advguard {

// Desk-scale models and synthetic datasets used by tests, the acceptance
// suite, and the demo workflow. Weights are constructed, not trained: the
// image model pairs orientation-matched quadrature filters (classification
// path) with high-gain high-frequency filters that smooth natural inputs
// barely excite; the audio model is a seeded random feature extractor with a
// prototype-matched readout.

inline constexpr int kImageClasses = 4;
inline constexpr int kAudioClasses = 4;

Model make_image_model(uint64_t seed = 7);

// Writes per-class stripe images (PGM) under dir/<label>/; returns file count.
int make_image_dataset(const std::filesystem::path& dir, const Model& model,
                       int per_class, uint64_t seed);

Model make_audio_model(uint64_t seed = 11);

// Writes per-class tone/chirp clips (WAV) under dir/<label>/.
int make_audio_dataset(const std::filesystem::path& dir, const Model& model,
                       int per_class, uint64_t seed);

// In-memory natural image sample for unit tests (model-ready tensor).
Tensor make_image_sample(const Model& model, int klass, uint64_t seed);

}  // namespace advguard
