#pragma once

#include <filesystem>
#include <vector>

#include "advguard/net.hpp"
#include "advguard/sampleset.hpp"
#include "advguard/tensor.hpp"

namespace advguard {

struct Waveform {
  int sample_rate = 0;
  std::vector<float> samples;  // mono, [-1,1]
};

// 16-bit PCM mono RIFF only; anything else is a hard error.
Waveform read_wav(const std::filesystem::path& file);
void write_wav(const std::filesystem::path& file, const Waveform& w);

// Triangular mel filterbank on the power-spectrum bins, HTK mel scale,
// each row normalized to unit sum. Rows: mel_filters, cols: fft/2+1.
std::vector<std::vector<float>> mel_filterbank(const MfccConfig& cfg);

// Frames x coefficients MFCC matrix. The waveform must already be at
// cfg.sample_rate; there is no resampling.
Tensor mfcc(const std::vector<float>& waveform, const MfccConfig& cfg);

// Center-crop / zero-pad the frame axis to target_frames.
Tensor fixed_length_features(const Tensor& features, int target_frames);

struct AudioIngestStats {
  int used = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

// WAV directory -> model-ready [1,T,C] feature tensors (MFCC, fixed length,
// manifest normalization). Label subdirectories work like image ingestion.
SampleSet ingest_audio(const std::filesystem::path& dir, const Model& m,
                       AudioIngestStats* stats = nullptr);

}  // namespace advguard
