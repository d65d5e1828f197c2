#include "advguard/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace advguard {

namespace fs = std::filesystem;

namespace {

// Next whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  while (in) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_int(std::istream& in, const std::string& what) {
  const std::string tok = next_token(in);
  try {
    return std::stoi(tok);
  } catch (...) {
    fail(Errc::bad_format, "bad " + what + " in image header");
  }
}

unsigned char to_byte(float v) {
  const float s = std::clamp(v, 0.f, 1.f) * 255.f;
  return static_cast<unsigned char>(std::lround(s));
}

}  // namespace

Tensor read_image(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + file.string());
  std::string magic = next_token(in);
  int channels;
  if (magic == "P5")
    channels = 1;
  else if (magic == "P6")
    channels = 3;
  else
    fail(Errc::bad_format, file.string() + ": not a binary PGM/PPM");

  const int w = parse_int(in, "width");
  const int h = parse_int(in, "height");
  const int maxval = parse_int(in, "maxval");
  if (w <= 0 || h <= 0) fail(Errc::bad_format, file.string() + ": bad dimensions");
  if (maxval <= 0 || maxval > 255)
    fail(Errc::bad_format, file.string() + ": only 8-bit images supported");

  const size_t count = static_cast<size_t>(w) * h * channels;
  std::vector<unsigned char> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
  if (static_cast<size_t>(in.gcount()) != count)
    fail(Errc::bad_format, file.string() + ": pixel data truncated");

  Tensor img({channels, h, w});
  const float scale = 1.f / static_cast<float>(maxval);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.at(c, y, x) = raw[(static_cast<size_t>(y) * w + x) * channels + c] * scale;
  return img;
}

void write_pgm(const fs::path& file, const Tensor& gray) {
  const Tensor* g = &gray;
  Tensor tmp;
  if (gray.rank() == 3 && gray.shape[0] == 1) {
    tmp = Tensor({gray.shape[1], gray.shape[2]}, gray.data);
    g = &tmp;
  }
  if (g->rank() != 2) fail(Errc::shape_mismatch, "write_pgm expects [H,W]");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + file.string());
  out << "P5\n" << g->shape[1] << " " << g->shape[0] << "\n255\n";
  for (float v : g->data) out.put(static_cast<char>(to_byte(v)));
  if (!out) fail(Errc::io_error, "short write on " + file.string());
}

void write_ppm(const fs::path& file, const Tensor& rgb) {
  if (rgb.rank() != 3 || rgb.shape[0] != 3)
    fail(Errc::shape_mismatch, "write_ppm expects [3,H,W]");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + file.string());
  const int h = rgb.shape[1], w = rgb.shape[2];
  out << "P6\n" << w << " " << h << "\n255\n";
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out.put(static_cast<char>(to_byte(rgb.at(c, y, x))));
  if (!out) fail(Errc::io_error, "short write on " + file.string());
}

void write_image(const fs::path& file, const Tensor& img) {
  if (img.rank() == 3 && img.shape[0] == 3)
    write_ppm(file, img);
  else
    write_pgm(file, img);
}

void normalize_inplace(Tensor& x, const Normalization& n) {
  if (n.axis < 0 || n.axis >= x.rank())
    fail(Errc::shape_mismatch, "normalization axis out of range");
  const int extent = x.shape[(size_t)n.axis];
  if ((int)n.mean.size() != extent || (int)n.std.size() != extent)
    fail(Errc::shape_mismatch, "normalization vectors do not match axis extent");
  size_t inner = 1;
  for (int a = n.axis + 1; a < x.rank(); ++a) inner *= (size_t)x.shape[(size_t)a];
  const size_t outer = x.numel() / (inner * (size_t)extent);
  for (size_t o = 0; o < outer; ++o)
    for (int e = 0; e < extent; ++e) {
      const float mean = n.mean[(size_t)e];
      const float inv = 1.f / n.std[(size_t)e];
      float* p = x.data.data() + (o * extent + (size_t)e) * inner;
      for (size_t i = 0; i < inner; ++i) p[i] = (p[i] - mean) * inv;
    }
}

SampleSet ingest_images(const fs::path& dir, const Model& m, IngestStats* stats) {
  if (!fs::is_directory(dir)) fail(Errc::io_error, dir.string() + " is not a directory");
  if (m.spec.modality != "image")
    fail(Errc::invalid_argument, "model is not an image model");

  std::vector<std::pair<std::string, fs::path>> files;  // (label, file)
  auto is_image = [](const fs::path& p) {
    const std::string e = p.extension().string();
    return e == ".pgm" || e == ".ppm";
  };
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      for (const auto& sub : fs::directory_iterator(entry.path()))
        if (sub.is_regular_file() && is_image(sub.path()))
          files.emplace_back(entry.path().filename().string(), sub.path());
    } else if (entry.is_regular_file() && is_image(entry.path())) {
      files.emplace_back("", entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  SampleSet set;
  set.modality = "image";
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  const int want_c = m.spec.input_shape[0];
  for (const auto& [label, file] : files) {
    try {
      Tensor img = read_image(file);
      if (img.shape[0] != want_c) {
        if (want_c == 1) {
          // channel-mean collapse
          Tensor g({1, img.shape[1], img.shape[2]});
          const size_t plane = g.numel();
          for (size_t i = 0; i < plane; ++i) {
            double acc = 0;
            for (int c = 0; c < img.shape[0]; ++c) acc += img.data[c * plane + i];
            g.data[i] = static_cast<float>(acc / img.shape[0]);
          }
          img = std::move(g);
        } else if (want_c == 3 && img.shape[0] == 1) {
          Tensor rgb({3, img.shape[1], img.shape[2]});
          const size_t plane = static_cast<size_t>(img.shape[1]) * img.shape[2];
          for (int c = 0; c < 3; ++c)
            std::copy(img.data.begin(), img.data.end(), rgb.data.begin() + c * plane);
          img = std::move(rgb);
        } else {
          fail(Errc::shape_mismatch, "channel count unsupported");
        }
      }
      if (img.shape[1] != m.spec.input_shape[1] || img.shape[2] != m.spec.input_shape[2])
        img = resize_bilinear(img, m.spec.input_shape[1], m.spec.input_shape[2]);
      normalize_inplace(img, m.spec.norm);

      SampleItem item;
      item.id = fs::relative(file, dir).generic_string();
      item.label = label;
      item.x = std::move(img);
      set.items.push_back(std::move(item));
      ++st.used;
    } catch (const Error& e) {
      ++st.skipped;
      st.warnings.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (set.items.empty())
    fail(Errc::no_usable_input, "no usable images in " + dir.string());
  return set;
}

}  // namespace advguard
