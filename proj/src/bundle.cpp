#include "advguard/bundle.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "advguard/hash.hpp"

namespace advguard {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;

std::string blob_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w_%04d.bin", index);
  return buf;
}

ordered_json load_manifest(const fs::path& dir, const std::string& expected_kind) {
  const fs::path file = dir / "manifest.json";
  std::ifstream in(file);
  if (!in) fail(Errc::io_error, "cannot open " + file.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_format, "manifest parse error: " + std::string(e.what()));
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    fail(Errc::bad_format, "manifest missing format_version");
  if (j["format_version"].get<int>() != kFormatVersion)
    fail(Errc::version_mismatch,
         "unsupported format_version " + j["format_version"].dump());
  if (j.value("kind", "") != expected_kind)
    fail(Errc::bad_format, "manifest kind is not '" + expected_kind + "'");
  return j;
}

void write_manifest(const fs::path& dir, const ordered_json& j) {
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write manifest in " + dir.string());
  out << j.dump(2) << "\n";
  if (!out) fail(Errc::io_error, "short write on manifest");
}

int append_blob(std::vector<std::pair<std::string, std::vector<float>>>& blobs,
                std::vector<float> values) {
  const int id = static_cast<int>(blobs.size());
  blobs.emplace_back(blob_name(id), std::move(values));
  return id;
}

void flush_blobs(const fs::path& dir,
                 const std::vector<std::pair<std::string, std::vector<float>>>& blobs) {
  for (const auto& [name, values] : blobs) write_blob(dir / name, values);
}

ordered_json norm_json(const Normalization& n) {
  return ordered_json{{"axis", n.axis}, {"mean", n.mean}, {"std", n.std}};
}

Normalization norm_from(const ordered_json& j) {
  Normalization n;
  n.axis = j.value("axis", 0);
  n.mean = j.at("mean").get<std::vector<float>>();
  n.std = j.at("std").get<std::vector<float>>();
  return n;
}

ordered_json mfcc_json(const MfccConfig& c) {
  return ordered_json{{"sample_rate", c.sample_rate}, {"frame_len", c.frame_len},
                      {"hop", c.hop},                 {"fft_size", c.fft_size},
                      {"mel_filters", c.mel_filters}, {"coefficients", c.coefficients},
                      {"pre_emphasis", c.pre_emphasis}, {"log_floor", c.log_floor}};
}

MfccConfig mfcc_from(const ordered_json& j) {
  MfccConfig c;
  c.sample_rate = j.at("sample_rate").get<int>();
  c.frame_len = j.at("frame_len").get<int>();
  c.hop = j.at("hop").get<int>();
  c.fft_size = j.at("fft_size").get<int>();
  c.mel_filters = j.at("mel_filters").get<int>();
  c.coefficients = j.at("coefficients").get<int>();
  c.pre_emphasis = j.at("pre_emphasis").get<double>();
  c.log_floor = j.at("log_floor").get<double>();
  return c;
}

}  // namespace

void write_blob(const fs::path& file, std::span<const float> values) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + file.string());
  const uint64_t n = values.size();
  unsigned char hdr[8];
  for (int i = 0; i < 8; ++i) hdr[i] = static_cast<unsigned char>((n >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(hdr), 8);
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * 4));
  if (!out) fail(Errc::io_error, "short write on " + file.string());
}

std::vector<float> read_blob(const fs::path& file) {
  std::error_code ec;
  const uint64_t fsize = fs::file_size(file, ec);
  if (ec) fail(Errc::io_error, "cannot stat " + file.string());
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + file.string());
  unsigned char hdr[8];
  in.read(reinterpret_cast<char*>(hdr), 8);
  if (in.gcount() != 8) fail(Errc::truncated_blob, file.string() + ": missing header");
  uint64_t n = 0;
  for (int i = 7; i >= 0; --i) n = (n << 8) | hdr[i];

  if (fsize < 8 + n * 4)
    fail(Errc::truncated_blob, file.string() + ": header promises " +
                                   std::to_string(n) + " floats, file is short");
  if (fsize > 8 + n * 4)
    fail(Errc::bad_format, file.string() + ": trailing bytes after blob");

  std::vector<float> values(n);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * 4));
  if (static_cast<uint64_t>(in.gcount()) != n * 4)
    fail(Errc::truncated_blob, file.string() + ": unexpected end of file");
  return values;
}

void save_model(const fs::path& dir, const Model& m) {
  const NetworkSpec& s = m.spec;
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "model";
  j["name"] = s.name;
  j["modality"] = s.modality;
  j["input_shape"] = s.input_shape;
  j["input_range"] = {s.input_lo, s.input_hi};
  j["normalization"] = norm_json(s.norm);
  j["labels"] = s.labels;
  j["last_conv"] = s.last_conv;
  if (s.mfcc) j["mfcc"] = mfcc_json(*s.mfcc);

  ordered_json layers = ordered_json::array();
  for (const LayerSpec& l : s.layers) {
    ordered_json lj;
    lj["kind"] = layer_kind_name(l.kind);
    switch (l.kind) {
      case LayerKind::conv2d:
        lj["in_channels"] = l.in_channels;
        lj["out_channels"] = l.out_channels;
        lj["kernel"] = {l.kernel_h, l.kernel_w};
        lj["stride"] = l.stride;
        lj["padding"] = l.padding;
        lj["weights"] = l.weights;
        lj["bias"] = l.bias;
        break;
      case LayerKind::maxpool2d:
      case LayerKind::avgpool2d:
        lj["kernel"] = {l.kernel_h, l.kernel_w};
        lj["stride"] = l.stride;
        break;
      case LayerKind::dense:
        lj["in_features"] = l.in_features;
        lj["out_features"] = l.out_features;
        lj["weights"] = l.weights;
        lj["bias"] = l.bias;
        break;
      default:
        break;
    }
    layers.push_back(lj);
  }
  j["layers"] = layers;

  ordered_json blobs = ordered_json::array();
  for (size_t i = 0; i < m.blobs.size(); ++i) {
    blobs.push_back(ordered_json{{"file", blob_name(static_cast<int>(i))},
                                 {"shape", m.blobs[i].shape},
                                 {"floats", m.blobs[i].numel()}});
  }
  j["blobs"] = blobs;

  write_manifest(dir, j);
  for (size_t i = 0; i < m.blobs.size(); ++i)
    write_blob(dir / blob_name(static_cast<int>(i)), m.blobs[i].data);
}

Model load_model(const fs::path& dir) {
  ordered_json j = load_manifest(dir, "model");
  Model m;
  NetworkSpec& s = m.spec;
  try {
    s.name = j.value("name", "");
    s.modality = j.at("modality").get<std::string>();
    s.input_shape = j.at("input_shape").get<std::vector<int>>();
    const auto range = j.at("input_range").get<std::vector<float>>();
    if (range.size() != 2) fail(Errc::bad_format, "input_range must have two entries");
    s.input_lo = range[0];
    s.input_hi = range[1];
    s.norm = norm_from(j.at("normalization"));
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.last_conv = j.at("last_conv").get<int>();
    if (j.contains("mfcc")) s.mfcc = mfcc_from(j["mfcc"]);

    for (const auto& lj : j.at("layers")) {
      LayerSpec l;
      l.kind = layer_kind_from(lj.at("kind").get<std::string>());
      switch (l.kind) {
        case LayerKind::conv2d: {
          l.in_channels = lj.at("in_channels").get<int>();
          l.out_channels = lj.at("out_channels").get<int>();
          const auto k = lj.at("kernel").get<std::vector<int>>();
          l.kernel_h = k.at(0);
          l.kernel_w = k.at(1);
          l.stride = lj.at("stride").get<int>();
          l.padding = lj.at("padding").get<int>();
          l.weights = lj.at("weights").get<int>();
          l.bias = lj.value("bias", -1);
          break;
        }
        case LayerKind::maxpool2d:
        case LayerKind::avgpool2d: {
          const auto k = lj.at("kernel").get<std::vector<int>>();
          l.kernel_h = k.at(0);
          l.kernel_w = k.at(1);
          l.stride = lj.at("stride").get<int>();
          break;
        }
        case LayerKind::dense:
          l.in_features = lj.at("in_features").get<int>();
          l.out_features = lj.at("out_features").get<int>();
          l.weights = lj.at("weights").get<int>();
          l.bias = lj.value("bias", -1);
          break;
        default:
          break;
      }
      s.layers.push_back(l);
    }

    for (const auto& bj : j.at("blobs")) {
      const std::string file = bj.at("file").get<std::string>();
      const auto shape = bj.at("shape").get<std::vector<int>>();
      const uint64_t declared = bj.at("floats").get<uint64_t>();
      const fs::path path = dir / file;
      if (fs::exists(path) && fs::file_size(path) < 8 + declared * 4)
        fail(Errc::truncated_blob, file + " smaller than manifest declares");
      std::vector<float> data = read_blob(path);
      if (data.size() != declared)
        fail(Errc::bad_format, file + " length disagrees with manifest");
      m.blobs.emplace_back(shape, std::move(data));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_format, "model manifest: " + std::string(e.what()));
  }
  validate_model(m);
  return m;
}

std::string model_hash(const Model& m) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const std::string& l : m.spec.labels) h = fnv1a64_str(l) ^ (h * 0x100000001b3ull);
  for (const Tensor& b : m.blobs)
    h = fnv1a64({reinterpret_cast<const unsigned char*>(b.data.data()),
                 b.data.size() * 4},
                h);
  return hex64(h);
}

void save_profiles(const fs::path& dir, const ProfileStore& store) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "profiles";
  j["modality"] = store.modality;
  j["grid"] = store.grid;
  j["channels"] = store.channels;
  j["min_samples"] = store.min_samples;
  j["crop"] = {{"alpha", store.crop.alpha}, {"min_frac", store.crop.min_frac}};
  j["model_hash"] = store.model_hash;
  j["calib_hash"] = store.calib_hash;

  std::vector<std::pair<std::string, std::vector<float>>> blobs;
  ordered_json classes = ordered_json::array();
  for (const auto& [label, prof] : store.classes) {
    ordered_json cj;
    cj["label"] = label;
    cj["n"] = prof.n;
    cj["purity"] = prof.purity;
    cj["f_exp"] = append_blob(blobs, prof.f_exp);
    cj["vote_ratio"] =
        prof.has_pattern() ? append_blob(blobs, prof.vote_ratio.data) : -1;
    classes.push_back(cj);
  }
  j["classes"] = classes;

  write_manifest(dir, j);
  flush_blobs(dir, blobs);
}

ProfileStore load_profiles(const fs::path& dir) {
  ordered_json j = load_manifest(dir, "profiles");
  ProfileStore store;
  try {
    store.modality = j.at("modality").get<std::string>();
    store.grid = j.at("grid").get<int>();
    store.channels = j.at("channels").get<int>();
    store.min_samples = j.at("min_samples").get<int>();
    store.crop.alpha = j.at("crop").at("alpha").get<double>();
    store.crop.min_frac = j.at("crop").at("min_frac").get<double>();
    store.model_hash = j.value("model_hash", "");
    store.calib_hash = j.value("calib_hash", "");

    for (const auto& cj : j.at("classes")) {
      ClassProfile prof;
      prof.label = cj.at("label").get<std::string>();
      prof.n = cj.at("n").get<int>();
      prof.purity = cj.at("purity").get<double>();
      prof.f_exp = read_blob(dir / blob_name(cj.at("f_exp").get<int>()));
      if ((int)prof.f_exp.size() != store.channels)
        fail(Errc::shape_inconsistency, "profile '" + prof.label +
                                            "' f_exp length mismatches channels");
      const int vr = cj.at("vote_ratio").get<int>();
      if (vr >= 0) {
        std::vector<float> data = read_blob(dir / blob_name(vr));
        const int s = store.grid;
        if ((int)data.size() != s * s)
          fail(Errc::shape_inconsistency, "vote_ratio grid size mismatch");
        prof.vote_ratio = Tensor({s, s}, std::move(data));
        prof.p_exp = BinaryPattern(s);
        for (size_t i = 0; i < prof.vote_ratio.numel(); ++i)
          prof.p_exp.bits[i] = prof.vote_ratio.data[i] >= 0.5f ? 1 : 0;
      }
      store.classes.emplace(prof.label, std::move(prof));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_format, "profiles manifest: " + std::string(e.what()));
  }
  return store;
}

void save_samples(const fs::path& dir, const SampleSet& set) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "samples";
  j["modality"] = set.modality;
  if (!set.items.empty()) j["item_shape"] = set.items.front().x.shape;

  ordered_json items = ordered_json::array();
  std::vector<std::pair<std::string, std::vector<float>>> blobs;
  for (const SampleItem& item : set.items) {
    ordered_json ij;
    ij["id"] = item.id;
    if (!item.label.empty()) ij["label"] = item.label;
    ij["adversarial"] = item.adversarial;
    if (!item.attack.empty()) ij["attack"] = item.attack;
    ij["blob"] = append_blob(blobs, item.x.data);
    items.push_back(ij);
  }
  j["items"] = items;

  write_manifest(dir, j);
  flush_blobs(dir, blobs);
}

SampleSet load_samples(const fs::path& dir) {
  ordered_json j = load_manifest(dir, "samples");
  SampleSet set;
  try {
    set.modality = j.at("modality").get<std::string>();
    std::vector<int> shape;
    if (j.contains("item_shape")) shape = j["item_shape"].get<std::vector<int>>();
    for (const auto& ij : j.at("items")) {
      SampleItem item;
      item.id = ij.at("id").get<std::string>();
      item.label = ij.value("label", "");
      item.adversarial = ij.value("adversarial", false);
      item.attack = ij.value("attack", "");
      std::vector<float> data = read_blob(dir / blob_name(ij.at("blob").get<int>()));
      if (Tensor::numel_of(shape) != data.size())
        fail(Errc::shape_inconsistency, "sample '" + item.id + "' wrong length");
      item.x = Tensor(shape, std::move(data));
      set.items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_format, "samples manifest: " + std::string(e.what()));
  }
  return set;
}

bool is_container_dir(const fs::path& dir) {
  return fs::exists(dir / "manifest.json");
}

uint64_t sampleset_hash(const SampleSet& s) {
  uint64_t h = fnv1a64_str(s.modality);
  for (const SampleItem& item : s.items) {
    uint64_t ih = fnv1a64_str(item.id);
    ih = fnv1a64({reinterpret_cast<const unsigned char*>(item.x.data.data()),
                  item.x.data.size() * 4},
                 ih);
    h ^= ih;  // order-independent combine
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace advguard
