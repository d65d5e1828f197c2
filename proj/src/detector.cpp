#include "advguard/detector.hpp"

#include "advguard/cam.hpp"
#include "advguard/freq.hpp"
#include "advguard/image_io.hpp"
#include "advguard/introspect.hpp"
#include "advguard/metric.hpp"

namespace advguard {

DetectionReport classify_with_verification(const Model& m, const Tensor& x,
                                           const ProfileStore& store,
                                           const DetectorOptions& opt,
                                           const std::string& input_id) {
  DetectionReport r;
  r.input_id = input_id;
  r.threshold_semantic = opt.thresholds.semantic;
  r.threshold_activation = opt.thresholds.activation;

  auto suspicious = [&](Errc code) {
    r.verdict = "suspicious";
    r.reason = errc_name(code);
    return r;
  };

  auto fwd = forward(m, x, true);
  const int predicted = argmax_index(fwd.output);
  r.predicted = m.spec.labels[(size_t)predicted];

  const ClassProfile* prof = store.find(r.predicted);
  if (!prof) return suspicious(Errc::missing_profile);

  const bool image = m.spec.modality == "image";

  if (image && prof->has_pattern()) {
    try {
      SaliencyMap map = saliency(fwd.trace, x.shape[1], x.shape[2]);
      if (opt.dump_saliency) {
        Tensor vis = map.fine;
        const float mx = *std::max_element(vis.data.begin(), vis.data.end());
        if (mx > 0)
          for (float& v : vis.data) v /= mx;
        std::filesystem::create_directories(*opt.dump_saliency);
        std::string name = input_id;
        for (char& c : name)
          if (c == '/' || c == '\\') c = '_';
        write_pgm(*opt.dump_saliency / (name + ".saliency.pgm"), vis);
      }
      CropRegion crop = locate_and_crop(x, map, store.crop);
      BinaryPattern pattern = binarize_adaptive(fft2d_logmag(crop.patch, store.grid));
      r.d_semantic = semantic_inconsistency(pattern, prof->p_exp);
    } catch (const Error& e) {
      return suspicious(e.code());
    }
  }

  try {
    const std::vector<float> f = last_conv_distribution(fwd.trace);
    r.d_activation = activation_inconsistency(f, prof->f_exp);
  } catch (const Error& e) {
    return suspicious(e.code());
  }

  // strict inequality: a score exactly at the threshold stays natural
  bool adversarial = false;
  if (r.d_semantic && *r.d_semantic > opt.thresholds.semantic) adversarial = true;
  if (r.d_activation && *r.d_activation > opt.thresholds.activation)
    adversarial = true;
  r.verdict = adversarial ? "adversarial" : "natural";
  return r;
}

std::vector<DetectionReport> detect_batch(const Model& m, const SampleSet& samples,
                                          const ProfileStore& store,
                                          const DetectorOptions& opt) {
  const int n = static_cast<int>(samples.items.size());
  std::vector<DetectionReport> reports(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const SampleItem& item = samples.items[(size_t)i];
    DetectionReport r;
    auto mark_suspicious = [&](Errc code) {
      r.input_id = item.id;
      r.threshold_semantic = opt.thresholds.semantic;
      r.threshold_activation = opt.thresholds.activation;
      r.verdict = "suspicious";
      r.reason = errc_name(code);
    };
    try {
      r = classify_with_verification(m, item.x, store, opt, item.id);
    } catch (const Error& e) {
      mark_suspicious(e.code());
    } catch (const std::exception&) {
      mark_suspicious(Errc::invalid_argument);
    }
    r.marked_adversarial = item.adversarial;
    if (!item.attack.empty()) r.attack = item.attack;
    reports[(size_t)i] = std::move(r);
  }
  return reports;
}

}  // namespace advguard
