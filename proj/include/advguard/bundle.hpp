#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "advguard/net.hpp"
#include "advguard/profiler.hpp"
#include "advguard/sampleset.hpp"

namespace advguard {

// Container convention shared by models, profile stores, and sample sets:
// a manifest.json plus length-prefixed float blobs w_<index>.bin
// (8-byte little-endian count, then that many little-endian 32-bit floats).

void write_blob(const std::filesystem::path& file, std::span<const float> values);
std::vector<float> read_blob(const std::filesystem::path& file);

void save_model(const std::filesystem::path& dir, const Model& m);
Model load_model(const std::filesystem::path& dir);
std::string model_hash(const Model& m);

void save_profiles(const std::filesystem::path& dir, const ProfileStore& store);
ProfileStore load_profiles(const std::filesystem::path& dir);

void save_samples(const std::filesystem::path& dir, const SampleSet& set);
SampleSet load_samples(const std::filesystem::path& dir);

bool is_container_dir(const std::filesystem::path& dir);

}  // namespace advguard
