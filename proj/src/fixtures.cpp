#include "advguard/fixtures.hpp"

#include <cmath>
#include <random>

#include "advguard/audio.hpp"
#include "advguard/image_io.hpp"

namespace advguard {

namespace fs = std::filesystem;

namespace {

constexpr int kImgSide = 32;
constexpr float kStripeFreq = 3.f / kImgSide;  // cycles per pixel
constexpr int kOrientFilters = 8;              // 4 orientations x (cos,sin)
constexpr int kHighFreqFilters = 4;            // one per class
constexpr int kConv1Out = kOrientFilters + kHighFreqFilters;
constexpr int kGroupSize = 3;  // last-conv channels per class
constexpr int kLastConv = kImageClasses * kGroupSize + kHighFreqFilters;  // 16

constexpr float kOrientGain = 4.f;
constexpr float kHighFreqGain = 12.f;
constexpr float kDenseClassWeight = 0.006f;
constexpr float kDenseOffWeight = -0.0015f;
constexpr float kDenseGenericWeight = 0.045f;
constexpr float kDenseGenericOff = -0.015f;

// (dy,dx) direction per class: horizontal, vertical, diagonal, anti-diagonal
constexpr double kDir[kImageClasses][2] = {
    {1.0, 0.0}, {0.0, 1.0}, {0.70710678, 0.70710678}, {0.70710678, -0.70710678}};

double stripe_phase_arg(int y, int x, int klass, double freq) {
  return 2.0 * M_PI * freq * (kDir[klass][0] * y + kDir[klass][1] * x);
}

void zero_mean_unit_l2(std::vector<float>& k, float gain) {
  double mean = 0;
  for (float v : k) mean += v;
  mean /= k.size();
  double l2 = 0;
  for (float& v : k) {
    v -= static_cast<float>(mean);
    l2 += static_cast<double>(v) * v;
  }
  l2 = std::sqrt(std::max(l2, 1e-12));
  for (float& v : k) v = static_cast<float>(v / l2 * gain);
}

}  // namespace

Model make_image_model(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.f, 1.f);

  Model m;
  NetworkSpec& s = m.spec;
  s.name = "desk-stripes";
  s.modality = "image";
  s.input_shape = {1, kImgSide, kImgSide};
  s.input_lo = 0.f;
  s.input_hi = 1.f;
  s.norm = Normalization{};  // identity: pixels stay in [0,1]
  s.labels = {"stripe-h", "stripe-v", "stripe-d", "stripe-a"};

  // conv1: 5x5 quadrature pairs per orientation + alternating-sign
  // high-frequency filters that smooth stripes barely excite
  const int k1 = 5;
  Tensor w1({kConv1Out, 1, k1, k1});
  for (int o = 0; o < kImageClasses; ++o) {
    for (int phase = 0; phase < 2; ++phase) {
      std::vector<float> kern(static_cast<size_t>(k1) * k1);
      for (int y = 0; y < k1; ++y)
        for (int x = 0; x < k1; ++x) {
          const double arg = stripe_phase_arg(y - 2, x - 2, o, kStripeFreq);
          kern[(size_t)y * k1 + x] =
              static_cast<float>(phase == 0 ? std::cos(arg) : std::sin(arg));
        }
      zero_mean_unit_l2(kern, kOrientGain);
      for (int y = 0; y < k1; ++y)
        for (int x = 0; x < k1; ++x)
          w1.data[((static_cast<size_t>(2 * o + phase)) * k1 + y) * k1 + x] =
              kern[(size_t)y * k1 + x];
    }
  }
  for (int j = 0; j < kHighFreqFilters; ++j) {
    std::vector<float> kern(static_cast<size_t>(k1) * k1);
    for (int y = 0; y < k1; ++y)
      for (int x = 0; x < k1; ++x) {
        const float sign = ((x + y) % 2 == 0) ? 1.f : -1.f;
        kern[(size_t)y * k1 + x] = sign * (0.7f + 0.6f * std::abs(noise(rng)));
      }
    zero_mean_unit_l2(kern, kHighFreqGain);
    for (int y = 0; y < k1; ++y)
      for (int x = 0; x < k1; ++x)
        w1.data[((static_cast<size_t>(kOrientFilters + j)) * k1 + y) * k1 + x] =
            kern[(size_t)y * k1 + x];
  }
  Tensor b1({kConv1Out});

  // conv2 center taps route quadrature pairs into per-class channel groups
  // and each high-frequency filter into its own generic channel
  Tensor w2({kLastConv, kConv1Out, 3, 3});
  auto tap = [&](int oc, int ic, float v) {
    w2.data[((static_cast<size_t>(oc) * kConv1Out + ic) * 3 + 1) * 3 + 1] = v;
  };
  for (int c = 0; c < kImageClasses; ++c) {
    const int cosf = 2 * c, sinf = 2 * c + 1;
    tap(kGroupSize * c + 0, cosf, 1.0f);
    tap(kGroupSize * c + 0, sinf, 1.0f);
    tap(kGroupSize * c + 1, cosf, 1.35f);
    tap(kGroupSize * c + 1, sinf, 0.25f);
    tap(kGroupSize * c + 2, cosf, 0.25f);
    tap(kGroupSize * c + 2, sinf, 1.35f);
  }
  for (int j = 0; j < kHighFreqFilters; ++j)
    tap(kImageClasses * kGroupSize + j, kOrientFilters + j, 1.0f);
  for (float& v : w2.data) v += 0.01f * noise(rng);  // texture, keeps channels distinct
  Tensor b2({kLastConv});

  // dense reads pooled 8x8 maps: own group positive, other groups slightly
  // negative, one generic channel preferred per class
  const int pooled = 8;
  const int flat = kLastConv * pooled * pooled;
  Tensor wd({kImageClasses, flat});
  for (int c = 0; c < kImageClasses; ++c)
    for (int ch = 0; ch < kLastConv; ++ch) {
      float v;
      if (ch < kImageClasses * kGroupSize) {
        v = (ch / kGroupSize == c) ? kDenseClassWeight : kDenseOffWeight;
      } else {
        v = (ch - kImageClasses * kGroupSize == c) ? kDenseGenericWeight
                                                   : kDenseGenericOff;
      }
      for (int i = 0; i < pooled * pooled; ++i)
        wd.data[(static_cast<size_t>(c) * kLastConv + ch) * pooled * pooled + i] = v;
    }
  Tensor bd({kImageClasses});

  m.blobs = {w1, b1, w2, b2, wd, bd};

  LayerSpec conv1;
  conv1.kind = LayerKind::conv2d;
  conv1.in_channels = 1;
  conv1.out_channels = kConv1Out;
  conv1.kernel_h = conv1.kernel_w = k1;
  conv1.stride = 1;
  conv1.padding = 2;
  conv1.weights = 0;
  conv1.bias = 1;

  LayerSpec relu{};
  relu.kind = LayerKind::relu;

  LayerSpec pool;
  pool.kind = LayerKind::maxpool2d;
  pool.kernel_h = pool.kernel_w = 2;
  pool.stride = 2;

  LayerSpec conv2;
  conv2.kind = LayerKind::conv2d;
  conv2.in_channels = kConv1Out;
  conv2.out_channels = kLastConv;
  conv2.kernel_h = conv2.kernel_w = 3;
  conv2.stride = 1;
  conv2.padding = 1;
  conv2.weights = 2;
  conv2.bias = 3;

  LayerSpec flatten{};
  flatten.kind = LayerKind::flatten;

  LayerSpec dense;
  dense.kind = LayerKind::dense;
  dense.in_features = flat;
  dense.out_features = kImageClasses;
  dense.weights = 4;
  dense.bias = 5;

  LayerSpec softmax{};
  softmax.kind = LayerKind::softmax;

  s.layers = {conv1, relu, pool, conv2, relu, pool, flatten, dense, softmax};
  s.last_conv = 3;

  validate_model(m);
  return m;
}

namespace {

Tensor render_stripe(int klass, double phase, double amp, double freq, double noise_sd,
                     std::mt19937_64& rng) {
  std::normal_distribution<float> pix(0.f, static_cast<float>(noise_sd));
  Tensor img({1, kImgSide, kImgSide});
  for (int y = 0; y < kImgSide; ++y)
    for (int x = 0; x < kImgSide; ++x) {
      const double v =
          0.5 + amp * std::sin(stripe_phase_arg(y, x, klass, freq) + phase);
      img.at(0, y, x) = std::clamp(static_cast<float>(v + pix(rng)), 0.f, 1.f);
    }
  return img;
}

}  // namespace

Tensor make_image_sample(const Model& model, int klass, uint64_t seed) {
  (void)model;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> amp(0.30, 0.45);
  std::uniform_real_distribution<double> jitter(0.94, 1.06);
  const double ph = phase(rng), am = amp(rng), fr = kStripeFreq * jitter(rng);
  return render_stripe(klass, ph, am, fr, 0.03, rng);
}

int make_image_dataset(const fs::path& dir, const Model& model, int per_class,
                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> amp(0.30, 0.45);
  std::uniform_real_distribution<double> jitter(0.94, 1.06);
  int written = 0;
  for (int c = 0; c < kImageClasses; ++c) {
    const fs::path sub = dir / model.spec.labels[(size_t)c];
    fs::create_directories(sub);
    for (int i = 0; i < per_class; ++i) {
      Tensor img = render_stripe(c, phase(rng), amp(rng), kStripeFreq * jitter(rng),
                                 0.03, rng);
      char name[32];
      std::snprintf(name, sizeof(name), "img_%04d.pgm", i);
      write_pgm(sub / name, Tensor({kImgSide, kImgSide}, img.data));
      ++written;
    }
  }
  return written;
}

namespace {

constexpr int kAudioFrames = 98;  // one second at the default front-end
constexpr double kToneHz[kAudioClasses] = {400.0, 1000.0, 2400.0, -1.0};  // -1 = chirp

std::vector<float> render_clip(int klass, double jitter, double noise_sd,
                               std::mt19937_64& rng) {
  const int n = 16000;
  std::normal_distribution<float> noise(0.f, static_cast<float>(noise_sd));
  std::vector<float> wav(static_cast<size_t>(n));
  double phase = 0;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    double hz;
    if (kToneHz[klass] > 0) {
      hz = kToneHz[klass] * jitter;
    } else {
      hz = (400.0 + 2000.0 * t) * jitter;  // linear chirp
    }
    phase += 2.0 * M_PI * hz / 16000.0;
    double env = 1.0;
    if (i < 800) env = i / 800.0;
    if (i > n - 800) env = (n - i) / 800.0;
    wav[(size_t)i] =
        static_cast<float>(0.5 * env * std::sin(phase)) + noise(rng);
  }
  return wav;
}

}  // namespace

Model make_audio_model(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.f, 1.f);

  Model m;
  NetworkSpec& s = m.spec;
  s.name = "desk-commands";
  s.modality = "audio-mfcc";
  s.mfcc = MfccConfig{};
  s.input_shape = {1, kAudioFrames, s.mfcc->coefficients};
  s.input_lo = -8.f;
  s.input_hi = 8.f;
  s.labels = {"tone-low", "tone-mid", "tone-high", "chirp"};

  const int conv1_out = 8, conv2_out = 16;
  Tensor w1({conv1_out, 1, 3, 3});
  for (int o = 0; o < conv1_out; ++o) {
    std::vector<float> kern(9);
    for (float& v : kern) v = noise(rng);
    zero_mean_unit_l2(kern, 2.2f);
    for (int i = 0; i < 9; ++i)
      w1.data[static_cast<size_t>(o) * 9 + i] = kern[(size_t)i];
  }
  Tensor b1({conv1_out});

  Tensor w2({conv2_out, conv1_out, 3, 3});
  for (int o = 0; o < conv2_out; ++o) {
    std::vector<float> kern(static_cast<size_t>(conv1_out) * 9);
    for (float& v : kern) v = noise(rng);
    zero_mean_unit_l2(kern, 1.8f);
    for (size_t i = 0; i < kern.size(); ++i)
      w2.data[static_cast<size_t>(o) * kern.size() + i] = kern[i];
  }
  Tensor b2({conv2_out});

  LayerSpec conv1;
  conv1.kind = LayerKind::conv2d;
  conv1.in_channels = 1;
  conv1.out_channels = conv1_out;
  conv1.kernel_h = conv1.kernel_w = 3;
  conv1.stride = 1;
  conv1.padding = 1;
  conv1.weights = 0;
  conv1.bias = 1;

  LayerSpec relu{};
  relu.kind = LayerKind::relu;

  LayerSpec pool1;
  pool1.kind = LayerKind::maxpool2d;
  pool1.kernel_h = 2;
  pool1.kernel_w = 2;
  pool1.stride = 2;  // [8,49,6]

  LayerSpec conv2;
  conv2.kind = LayerKind::conv2d;
  conv2.in_channels = conv1_out;
  conv2.out_channels = conv2_out;
  conv2.kernel_h = conv2.kernel_w = 3;
  conv2.stride = 1;
  conv2.padding = 1;
  conv2.weights = 2;
  conv2.bias = 3;

  LayerSpec pool2;
  pool2.kind = LayerKind::avgpool2d;
  pool2.kernel_h = 49;
  pool2.kernel_w = 6;
  pool2.stride = 1;  // global: [16,1,1]

  LayerSpec flatten{};
  flatten.kind = LayerKind::flatten;

  LayerSpec dense;
  dense.kind = LayerKind::dense;
  dense.in_features = conv2_out;
  dense.out_features = kAudioClasses;
  dense.weights = 4;
  dense.bias = 5;

  LayerSpec softmax{};
  softmax.kind = LayerKind::softmax;

  // readout calibrated below from prototype clips
  Tensor wd({kAudioClasses, conv2_out});
  Tensor bd({kAudioClasses});
  m.blobs = {w1, b1, w2, b2, wd, bd};
  s.layers = {conv1, relu, pool1, conv2, relu, pool2, flatten, dense, softmax};
  s.last_conv = 3;
  s.norm.axis = 2;
  s.norm.mean.assign((size_t)s.mfcc->coefficients, 0.f);
  s.norm.std.assign((size_t)s.mfcc->coefficients, 1.f);
  validate_model(m);

  // prototype pass 1: per-coefficient normalization constants
  constexpr int kProtos = 12;
  std::vector<Tensor> feats;
  std::vector<int> feat_class;
  std::mt19937_64 proto_rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> jit(0.98, 1.02);
  for (int c = 0; c < kAudioClasses; ++c)
    for (int i = 0; i < kProtos; ++i) {
      const auto wav = render_clip(c, jit(proto_rng), 0.01, proto_rng);
      Tensor f = fixed_length_features(mfcc(wav, *s.mfcc), kAudioFrames);
      feats.push_back(std::move(f));
      feat_class.push_back(c);
    }
  const int coeffs = s.mfcc->coefficients;
  for (int j = 0; j < coeffs; ++j) {
    double mean = 0, var = 0;
    size_t count = 0;
    for (const Tensor& f : feats)
      for (int t = 0; t < kAudioFrames; ++t) {
        mean += f.at(t, j);
        ++count;
      }
    mean /= static_cast<double>(count);
    for (const Tensor& f : feats)
      for (int t = 0; t < kAudioFrames; ++t) {
        const double d = f.at(t, j) - mean;
        var += d * d;
      }
    var /= static_cast<double>(count);
    s.norm.mean[(size_t)j] = static_cast<float>(mean);
    s.norm.std[(size_t)j] = static_cast<float>(std::sqrt(std::max(var, 1e-6)));
  }

  // prototype pass 2: class-mean pooled features drive the dense readout
  std::vector<std::vector<double>> mu(kAudioClasses,
                                      std::vector<double>(conv2_out, 0.0));
  std::vector<int> counts(kAudioClasses, 0);
  for (size_t i = 0; i < feats.size(); ++i) {
    Tensor x({1, kAudioFrames, coeffs}, feats[i].data);
    normalize_inplace(x, s.norm);
    auto fwd = forward(m, x, true);
    const Tensor& pooled = fwd.trace.outputs[6];  // flatten output [16]
    for (int ch = 0; ch < conv2_out; ++ch)
      mu[(size_t)feat_class[i]][(size_t)ch] += pooled.data[(size_t)ch];
    ++counts[(size_t)feat_class[i]];
  }
  std::vector<double> grand(conv2_out, 0.0);
  for (int c = 0; c < kAudioClasses; ++c)
    for (int ch = 0; ch < conv2_out; ++ch) {
      mu[(size_t)c][(size_t)ch] /= counts[(size_t)c];
      grand[(size_t)ch] += mu[(size_t)c][(size_t)ch] / kAudioClasses;
    }
  double scale_norm = 0;
  for (int c = 0; c < kAudioClasses; ++c)
    for (int ch = 0; ch < conv2_out; ++ch) {
      const double d = mu[(size_t)c][(size_t)ch] - grand[(size_t)ch];
      scale_norm += d * d;
    }
  const double readout_gain = 6.0 / std::sqrt(std::max(scale_norm / kAudioClasses, 1e-9));
  for (int c = 0; c < kAudioClasses; ++c)
    for (int ch = 0; ch < conv2_out; ++ch)
      m.blobs[4].data[static_cast<size_t>(c) * conv2_out + ch] = static_cast<float>(
          readout_gain * (mu[(size_t)c][(size_t)ch] - grand[(size_t)ch]));

  validate_model(m);
  return m;
}

int make_audio_dataset(const fs::path& dir, const Model& model, int per_class,
                       uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(0.98, 1.02);
  int written = 0;
  for (int c = 0; c < kAudioClasses; ++c) {
    const fs::path sub = dir / model.spec.labels[(size_t)c];
    fs::create_directories(sub);
    for (int i = 0; i < per_class; ++i) {
      Waveform w;
      w.sample_rate = 16000;
      w.samples = render_clip(c, jit(rng), 0.01, rng);
      char name[32];
      std::snprintf(name, sizeof(name), "clip_%04d.wav", i);
      write_wav(sub / name, w);
      ++written;
    }
  }
  return written;
}

}  // namespace advguard
