#include "advguard/freq.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

namespace advguard {

size_t BinaryPattern::count_true() const {
  size_t n = 0;
  for (uint8_t b : bits) n += b;
  return n;
}

Tensor to_gray(const Tensor& x) {
  if (x.rank() == 2) return x;
  if (x.rank() != 3) fail(Errc::shape_mismatch, "to_gray expects rank 2 or 3");
  Tensor g({x.shape[1], x.shape[2]});
  const size_t plane = static_cast<size_t>(x.shape[1]) * x.shape[2];
  for (size_t i = 0; i < plane; ++i) {
    double acc = 0;
    for (int c = 0; c < x.shape[0]; ++c) acc += x.data[c * plane + i];
    g.data[i] = static_cast<float>(acc / x.shape[0]);
  }
  return g;
}

namespace {

// FFTW planning is not thread-safe; executing a cached plan on fresh arrays
// is. Plans are created with FFTW_UNALIGNED so plain vectors can back them.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan plan_2d(int h, int w) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(h, w);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> dummy(static_cast<size_t>(h) * w);
    fftw_plan p = fftw_plan_dft_2d(
        h, w, reinterpret_cast<fftw_complex*>(dummy.data()),
        reinterpret_cast<fftw_complex*>(dummy.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

Tensor fft2d_centered_mag(const Tensor& gray) {
  if (gray.rank() != 2) fail(Errc::shape_mismatch, "fft2d expects a rank-2 grid");
  const int h = gray.shape[0], w = gray.shape[1];
  std::vector<std::complex<double>> in(static_cast<size_t>(h) * w);
  std::vector<std::complex<double>> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) in[i] = gray.data[i];

  fftw_plan p = PlanCache::instance().plan_2d(h, w);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));

  // quadrant swap: bin (y,x) moves to ((y+h/2)%h, (x+w/2)%w)
  Tensor mag({h, w});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int sy = (y + h / 2) % h;
      const int sx = (x + w / 2) % w;
      mag.at(sy, sx) = static_cast<float>(std::abs(out[static_cast<size_t>(y) * w + x]));
    }
  return mag;
}

Tensor fft2d_logmag(const Tensor& crop, int grid) {
  if (grid < 2) fail(Errc::invalid_argument, "fft grid must be >= 2");
  Tensor g = to_gray(crop);
  if (g.shape[0] != grid || g.shape[1] != grid) g = resize_bilinear(g, grid, grid);
  Tensor mag = fft2d_centered_mag(g);
  for (float& v : mag.data) v = std::log1p(v);
  return mag;
}

double otsu_threshold(const Tensor& grid) {
  const auto [mn_it, mx_it] = std::minmax_element(grid.data.begin(), grid.data.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mn == mx) fail(Errc::degenerate_spectrum, "all-equal grid has no threshold");

  constexpr int kBins = 256;
  std::vector<double> hist(kBins, 0.0);
  const double scale = kBins / (mx - mn);
  for (float v : grid.data) {
    int b = static_cast<int>((v - mn) * scale);
    if (b >= kBins) b = kBins - 1;
    hist[static_cast<size_t>(b)] += 1.0;
  }

  const double total = static_cast<double>(grid.numel());
  double sum_all = 0;
  for (int b = 0; b < kBins; ++b) sum_all += b * hist[(size_t)b];

  // maximize between-class variance; first maximal bin wins
  double w0 = 0, sum0 = 0, best = -1.0;
  int best_bin = 0;
  for (int t = 0; t < kBins; ++t) {
    const double w1 = total - w0;
    if (w0 > 0 && w1 > 0) {
      const double mu0 = sum0 / w0;
      const double mu1 = (sum_all - sum0) / w1;
      const double bcv = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
      if (bcv > best) {
        best = bcv;
        best_bin = t;
      }
    }
    w0 += hist[(size_t)t];
    sum0 += t * hist[(size_t)t];
  }
  return mn + best_bin * (mx - mn) / kBins;
}

BinaryPattern binarize_adaptive(const Tensor& grid) {
  if (grid.rank() != 2 || grid.shape[0] != grid.shape[1])
    fail(Errc::shape_mismatch, "binarize expects a square grid");
  const double thr = otsu_threshold(grid);
  BinaryPattern p(grid.shape[0]);
  for (size_t i = 0; i < grid.numel(); ++i) p.bits[i] = grid.data[i] >= thr ? 1 : 0;
  return p;
}

double semantic_inconsistency(const BinaryPattern& a, const BinaryPattern& b) {
  if (a.size != b.size || a.size == 0)
    fail(Errc::shape_mismatch, "pattern sizes differ");
  size_t uni = 0, inter = 0;
  for (size_t i = 0; i < a.bits.size(); ++i) {
    const bool av = a.bits[i] != 0, bv = b.bits[i] != 0;
    uni += (av || bv) ? 1 : 0;
    inter += (av && bv) ? 1 : 0;
  }
  if (uni == 0) fail(Errc::empty_union, "both patterns are empty");
  return static_cast<double>(uni - inter) / static_cast<double>(uni);
}

}  // namespace advguard
