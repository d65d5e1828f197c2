#include "advguard/audio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "advguard/image_io.hpp"

namespace advguard {

namespace fs = std::filesystem;

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}
void wr_u16(std::ofstream& out, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 2);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Cached real-to-complex plans, same locking story as the 2D case.
class R2cCache {
 public:
  static R2cCache& instance() {
    static R2cCache c;
    return c;
  }
  fftw_plan plan(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(static_cast<size_t>(n));
    std::vector<std::complex<double>> out(static_cast<size_t>(n) / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in.data(),
                                       reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

}  // namespace

Waveform read_wav(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + file.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(Errc::bad_format, file.string() + ": not a RIFF WAVE file");

  Waveform w;
  int channels = 0, bits = 0;
  bool have_fmt = false, have_data = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t size = rd_u32(bytes.data() + pos + 4);
    if (pos + 8 + size > bytes.size())
      fail(Errc::bad_format, file.string() + ": chunk overruns file");
    const unsigned char* body = bytes.data() + pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) fail(Errc::bad_format, "fmt chunk too small");
      const uint16_t format = rd_u16(body);
      channels = rd_u16(body + 2);
      w.sample_rate = static_cast<int>(rd_u32(body + 4));
      bits = rd_u16(body + 14);
      if (format != 1) fail(Errc::bad_format, file.string() + ": only PCM supported");
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) fail(Errc::bad_format, "data chunk before fmt");
      if (channels != 1) fail(Errc::bad_format, file.string() + ": mono only");
      if (bits != 16) fail(Errc::bad_format, file.string() + ": 16-bit only");
      const size_t n = size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const int16_t s =
            static_cast<int16_t>(body[2 * i] | (body[2 * i + 1] << 8));
        w.samples[i] = static_cast<float>(s) / 32768.f;
      }
      have_data = true;
    }
    pos += 8 + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_data) fail(Errc::bad_format, file.string() + ": no data chunk");
  return w;
}

void write_wav(const fs::path& file, const Waveform& w) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + file.string());
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  wr_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  wr_u32(out, 16);
  wr_u16(out, 1);  // PCM
  wr_u16(out, 1);  // mono
  wr_u32(out, static_cast<uint32_t>(w.sample_rate));
  wr_u32(out, static_cast<uint32_t>(w.sample_rate * 2));
  wr_u16(out, 2);
  wr_u16(out, 16);
  out.write("data", 4);
  wr_u32(out, data_bytes);
  for (float v : w.samples) {
    const float c = std::clamp(v, -1.f, 1.f);
    const int16_t s = static_cast<int16_t>(std::lround(c * 32767.f));
    wr_u16(out, static_cast<uint16_t>(s));
  }
  if (!out) fail(Errc::io_error, "short write on " + file.string());
}

std::vector<std::vector<float>> mel_filterbank(const MfccConfig& cfg) {
  const int bins = cfg.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_size;
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(cfg.sample_rate / 2.0);
  std::vector<double> centers(static_cast<size_t>(cfg.mel_filters) + 2);
  for (size_t i = 0; i < centers.size(); ++i)
    centers[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                        (cfg.mel_filters + 1));

  std::vector<std::vector<float>> fb(static_cast<size_t>(cfg.mel_filters),
                                     std::vector<float>(static_cast<size_t>(bins), 0.f));
  for (int f = 0; f < cfg.mel_filters; ++f) {
    const double lo = centers[(size_t)f], mid = centers[(size_t)f + 1],
                 hi = centers[(size_t)f + 2];
    double sum = 0;
    for (int b = 0; b < bins; ++b) {
      const double hz = b * bin_hz;
      double v = 0;
      if (hz > lo && hz < mid)
        v = (hz - lo) / (mid - lo);
      else if (hz >= mid && hz < hi)
        v = (hi - hz) / (hi - mid);
      fb[(size_t)f][(size_t)b] = static_cast<float>(v);
      sum += v;
    }
    if (sum <= 0) fail(Errc::invalid_argument, "empty mel filter; fft size too small");
    for (float& v : fb[(size_t)f]) v = static_cast<float>(v / sum);
  }
  return fb;
}

Tensor mfcc(const std::vector<float>& waveform, const MfccConfig& cfg) {
  if (cfg.fft_size < cfg.frame_len)
    fail(Errc::invalid_argument, "fft size smaller than frame");
  if (cfg.coefficients > cfg.mel_filters)
    fail(Errc::invalid_argument, "more coefficients than mel filters");
  const int n = static_cast<int>(waveform.size());
  if (n < cfg.frame_len) fail(Errc::invalid_argument, "waveform shorter than one frame");

  // pre-emphasis, y[0] = (1 - a) x[0]
  std::vector<double> emph(static_cast<size_t>(n));
  emph[0] = waveform[0] - cfg.pre_emphasis * waveform[0];
  for (int i = 1; i < n; ++i)
    emph[(size_t)i] = waveform[(size_t)i] - cfg.pre_emphasis * waveform[(size_t)i - 1];

  std::vector<double> window(static_cast<size_t>(cfg.frame_len));
  for (int i = 0; i < cfg.frame_len; ++i)
    window[(size_t)i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (cfg.frame_len - 1));

  const int frames = 1 + (n - cfg.frame_len) / cfg.hop;
  const int bins = cfg.fft_size / 2 + 1;
  const auto fb = mel_filterbank(cfg);
  fftw_plan plan = R2cCache::instance().plan(cfg.fft_size);

  Tensor out({frames, cfg.coefficients});

  // Orthonormal DCT-II basis over the filter axis.
  const int m = cfg.mel_filters;
  std::vector<double> dct(static_cast<size_t>(cfg.coefficients) * m);
  for (int j = 0; j < cfg.coefficients; ++j) {
    const double s = j == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int i = 0; i < m; ++i)
      dct[(size_t)j * m + i] = s * std::cos(M_PI * j * (2 * i + 1) / (2.0 * m));
  }

#pragma omp parallel
  {
    std::vector<double> buf(static_cast<size_t>(cfg.fft_size));
    std::vector<std::complex<double>> spec(static_cast<size_t>(bins));
    std::vector<double> energies(static_cast<size_t>(m));
#pragma omp for schedule(static)
    for (int t = 0; t < frames; ++t) {
      const int off = t * cfg.hop;
      for (int i = 0; i < cfg.frame_len; ++i)
        buf[(size_t)i] = emph[(size_t)(off + i)] * window[(size_t)i];
      std::fill(buf.begin() + cfg.frame_len, buf.end(), 0.0);
      fftw_execute_dft_r2c(plan, buf.data(),
                           reinterpret_cast<fftw_complex*>(spec.data()));
      for (int f = 0; f < m; ++f) {
        double acc = 0;
        for (int b = 0; b < bins; ++b) {
          const double p = std::norm(spec[(size_t)b]);
          acc += fb[(size_t)f][(size_t)b] * p;
        }
        energies[(size_t)f] = std::log(std::max(acc, cfg.log_floor));
      }
      for (int j = 0; j < cfg.coefficients; ++j) {
        double acc = 0;
        for (int i = 0; i < m; ++i) acc += dct[(size_t)j * m + i] * energies[(size_t)i];
        out.at(t, j) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Tensor fixed_length_features(const Tensor& features, int target_frames) {
  if (features.rank() != 2) fail(Errc::shape_mismatch, "features must be [T,C]");
  if (target_frames < 1) fail(Errc::invalid_argument, "target_frames must be >= 1");
  const int t = features.shape[0], c = features.shape[1];
  if (t == target_frames) return features;
  Tensor out({target_frames, c});
  if (t > target_frames) {
    const int start = (t - target_frames) / 2;
    for (int y = 0; y < target_frames; ++y)
      for (int x = 0; x < c; ++x) out.at(y, x) = features.at(start + y, x);
  } else {
    const int pad = (target_frames - t) / 2;
    for (int y = 0; y < t; ++y)
      for (int x = 0; x < c; ++x) out.at(pad + y, x) = features.at(y, x);
  }
  return out;
}

SampleSet ingest_audio(const fs::path& dir, const Model& m, AudioIngestStats* stats) {
  if (!fs::is_directory(dir)) fail(Errc::io_error, dir.string() + " is not a directory");
  if (m.spec.modality != "audio-mfcc")
    fail(Errc::invalid_argument, "model is not an audio model");
  if (!m.spec.mfcc) fail(Errc::bad_format, "audio model manifest lacks mfcc config");
  const MfccConfig& cfg = *m.spec.mfcc;
  const int target_frames = m.spec.input_shape[1];
  const int coeffs = m.spec.input_shape[2];
  if (coeffs != cfg.coefficients)
    fail(Errc::shape_inconsistency, "input shape disagrees with mfcc coefficients");

  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      for (const auto& sub : fs::directory_iterator(entry.path()))
        if (sub.is_regular_file() && sub.path().extension() == ".wav")
          files.emplace_back(entry.path().filename().string(), sub.path());
    } else if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.emplace_back("", entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  SampleSet set;
  set.modality = "audio-mfcc";
  AudioIngestStats local;
  AudioIngestStats& st = stats ? *stats : local;
  for (const auto& [label, file] : files) {
    try {
      Waveform w = read_wav(file);
      if (w.sample_rate != cfg.sample_rate)
        fail(Errc::bad_format, "sample rate " + std::to_string(w.sample_rate) +
                                   " != required " + std::to_string(cfg.sample_rate));
      Tensor feats = fixed_length_features(mfcc(w.samples, cfg), target_frames);
      Tensor x({1, target_frames, cfg.coefficients}, std::move(feats.data));
      normalize_inplace(x, m.spec.norm);
      SampleItem item;
      item.id = fs::relative(file, dir).generic_string();
      item.label = label;
      item.x = std::move(x);
      set.items.push_back(std::move(item));
      ++st.used;
    } catch (const Error& e) {
      ++st.skipped;
      st.warnings.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (set.items.empty())
    fail(Errc::no_usable_input, "no usable wav files in " + dir.string());
  return set;
}

}  // namespace advguard
