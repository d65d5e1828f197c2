#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "advguard/net.hpp"

namespace testutil {

using namespace advguard;

inline Tensor random_tensor(const std::vector<int>& shape, uint64_t seed,
                            float lo = -1.f, float hi = 1.f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  Tensor t(shape);
  for (float& v : t.data) v = dist(rng);
  return t;
}

// conv -> relu -> maxpool -> conv -> relu -> avgpool -> flatten -> dense ->
// softmax on a small input; covers every layer kind.
inline Model small_net(uint64_t seed, int in_c = 2, int side = 8) {
  Model m;
  NetworkSpec& s = m.spec;
  s.name = "test-net";
  s.input_shape = {in_c, side, side};
  s.labels = {"a", "b", "c"};
  s.input_lo = -2.f;
  s.input_hi = 2.f;

  const int c1 = 4, c2 = 3;
  m.blobs.push_back(random_tensor({c1, in_c, 3, 3}, seed + 1, -0.5f, 0.5f));
  m.blobs.push_back(random_tensor({c1}, seed + 2, -0.1f, 0.1f));
  m.blobs.push_back(random_tensor({c2, c1, 3, 3}, seed + 3, -0.5f, 0.5f));
  m.blobs.push_back(random_tensor({c2}, seed + 4, -0.1f, 0.1f));
  const int pooled = side / 2 / 2;
  const int flat = c2 * pooled * pooled;
  m.blobs.push_back(random_tensor({3, flat}, seed + 5, -0.5f, 0.5f));
  m.blobs.push_back(random_tensor({3}, seed + 6, -0.1f, 0.1f));

  LayerSpec conv1;
  conv1.kind = LayerKind::conv2d;
  conv1.in_channels = in_c;
  conv1.out_channels = c1;
  conv1.kernel_h = conv1.kernel_w = 3;
  conv1.stride = 1;
  conv1.padding = 1;
  conv1.weights = 0;
  conv1.bias = 1;

  LayerSpec relu{};
  relu.kind = LayerKind::relu;

  LayerSpec maxp;
  maxp.kind = LayerKind::maxpool2d;
  maxp.kernel_h = maxp.kernel_w = 2;
  maxp.stride = 2;

  LayerSpec conv2;
  conv2.kind = LayerKind::conv2d;
  conv2.in_channels = c1;
  conv2.out_channels = c2;
  conv2.kernel_h = conv2.kernel_w = 3;
  conv2.stride = 1;
  conv2.padding = 1;
  conv2.weights = 2;
  conv2.bias = 3;

  LayerSpec avgp;
  avgp.kind = LayerKind::avgpool2d;
  avgp.kernel_h = avgp.kernel_w = 2;
  avgp.stride = 2;

  LayerSpec flat_l{};
  flat_l.kind = LayerKind::flatten;

  LayerSpec dense;
  dense.kind = LayerKind::dense;
  dense.in_features = flat;
  dense.out_features = 3;
  dense.weights = 4;
  dense.bias = 5;

  LayerSpec softmax{};
  softmax.kind = LayerKind::softmax;

  s.layers = {conv1, relu, maxp, conv2, relu, avgp, flat_l, dense, softmax};
  s.last_conv = 3;
  validate_model(m);
  return m;
}

// single dense layer, weights given, no bias
inline Model linear_net(const std::vector<float>& w) {
  Model m;
  NetworkSpec& s = m.spec;
  s.name = "linear";
  s.input_shape = {1, 1, static_cast<int>(w.size())};
  s.labels = {"out"};
  s.input_lo = -10.f;
  s.input_hi = 10.f;

  // conv2d 1x1 so the net has a legal last_conv, then flatten + dense
  Tensor cw({1, 1, 1, 1});
  cw.data[0] = 1.f;
  m.blobs.push_back(cw);
  m.blobs.push_back(Tensor({static_cast<int>(1)}));
  m.blobs.push_back(Tensor({1, static_cast<int>(w.size())}, w));

  LayerSpec conv;
  conv.kind = LayerKind::conv2d;
  conv.in_channels = 1;
  conv.out_channels = 1;
  conv.kernel_h = conv.kernel_w = 1;
  conv.stride = 1;
  conv.padding = 0;
  conv.weights = 0;
  conv.bias = 1;

  LayerSpec flat{};
  flat.kind = LayerKind::flatten;

  LayerSpec dense;
  dense.kind = LayerKind::dense;
  dense.in_features = static_cast<int>(w.size());
  dense.out_features = 1;
  dense.weights = 2;
  dense.bias = -1;

  m.spec.layers = {conv, flat, dense};
  m.spec.last_conv = 0;
  validate_model(m);
  return m;
}

class TmpDir {
 public:
  explicit TmpDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("advguard_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
