#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "advguard/net.hpp"
#include "advguard/sampleset.hpp"
#include "advguard/tensor.hpp"

namespace advguard {

// Binary PGM (P5) and PPM (P6), 8-bit, values scaled to [0,1].
Tensor read_image(const std::filesystem::path& file);  // [C,H,W], C = 1 or 3
void write_pgm(const std::filesystem::path& file, const Tensor& gray);  // [H,W] in [0,1]
void write_ppm(const std::filesystem::path& file, const Tensor& rgb);   // [3,H,W]
void write_image(const std::filesystem::path& file, const Tensor& img); // picks by C

struct IngestStats {
  int used = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

// Reads every .pgm/.ppm under dir (one level of label subdirectories allowed,
// the subdirectory name becoming the true label), resizes to the model input
// and applies the manifest normalization. Files are taken in sorted order.
SampleSet ingest_images(const std::filesystem::path& dir, const Model& m,
                        IngestStats* stats = nullptr);

// Shared by image and audio ingestion.
void normalize_inplace(Tensor& x, const Normalization& n);

}  // namespace advguard
