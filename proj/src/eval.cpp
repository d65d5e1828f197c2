#include "advguard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace advguard {

using ordered_json = nlohmann::ordered_json;

double primary_score(const DetectionReport& r, const std::string& modality) {
  if (r.verdict == "suspicious") return std::numeric_limits<double>::infinity();
  if (modality == "image" && r.d_semantic) return *r.d_semantic;
  if (r.d_activation) return *r.d_activation;
  return std::numeric_limits<double>::infinity();
}

double auc_score(const std::vector<double>& natural_scores,
                 const std::vector<double>& adversarial_scores) {
  if (natural_scores.empty() || adversarial_scores.empty())
    fail(Errc::invalid_argument, "auc needs both populations");
  // rank once over the pooled sample, midranks for ties
  struct Entry {
    double v;
    bool adv;
  };
  std::vector<Entry> all;
  all.reserve(natural_scores.size() + adversarial_scores.size());
  for (double v : natural_scores) all.push_back({v, false});
  for (double v : adversarial_scores) all.push_back({v, true});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.v < b.v; });

  double rank_sum_adv = 0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t k = i; k < j; ++k)
      if (all[k].adv) rank_sum_adv += midrank;
    i = j;
  }
  const double n_adv = static_cast<double>(adversarial_scores.size());
  const double n_nat = static_cast<double>(natural_scores.size());
  const double u = rank_sum_adv - n_adv * (n_adv + 1) / 2.0;
  return u / (n_adv * n_nat);
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EvaluationSummary summarize(const std::vector<DetectionReport>& reports,
                            const std::string& modality, const EvalConfig& cfg) {
  EvaluationSummary s;
  s.modality = modality;

  std::vector<double> nat_scores, adv_scores;
  std::map<std::string, std::vector<double>> kind_scores;
  std::map<std::string, int> kind_flagged;
  int nat_flagged = 0, adv_flagged = 0;

  for (const DetectionReport& r : reports) {
    const bool marked = r.marked_adversarial.value_or(false);
    const double score = primary_score(r, modality);
    const bool flagged = r.verdict != "natural";
    if (marked) {
      ++s.adversarials;
      adv_scores.push_back(score);
      if (flagged) ++adv_flagged;
      const std::string kind = r.attack.empty() ? "unknown" : r.attack;
      kind_scores[kind].push_back(score);
      if (flagged) ++kind_flagged[kind];
    } else {
      ++s.naturals;
      nat_scores.push_back(score);
      if (flagged) ++nat_flagged;
    }
  }
  if (s.naturals == 0 && s.adversarials == 0)
    fail(Errc::no_usable_input, "no reports to summarize");

  s.detection_rate = s.adversarials ? (double)adv_flagged / s.adversarials : 0;
  s.fpr = s.naturals ? (double)nat_flagged / s.naturals : 0;
  s.median_natural = median_of(nat_scores);
  s.median_adversarial = median_of(adv_scores);
  if (!nat_scores.empty() && !adv_scores.empty())
    s.auc = auc_score(nat_scores, adv_scores);

  for (auto& [kind, scores] : kind_scores) {
    KindStats ks;
    ks.count = (int)scores.size();
    ks.detection_rate = (double)kind_flagged[kind] / ks.count;
    if (!nat_scores.empty()) ks.auc = auc_score(nat_scores, scores);
    ks.median_score = median_of(scores);
    s.per_attack.emplace(kind, ks);
  }

  // threshold sweep over the primary score; score > tau flags an item
  if (!nat_scores.empty() && !adv_scores.empty() && cfg.grid_step > 0) {
    for (double tau = cfg.grid_lo; tau <= cfg.grid_hi + 1e-12; tau += cfg.grid_step) {
      RatePoint p;
      p.threshold = tau;
      int d = 0, f = 0;
      for (double v : adv_scores) d += v > tau ? 1 : 0;
      for (double v : nat_scores) f += v > tau ? 1 : 0;
      p.detection = (double)d / adv_scores.size();
      p.fpr = (double)f / nat_scores.size();
      s.grid.push_back(p);
    }
    for (const RatePoint& p : s.grid) {
      if (p.fpr > cfg.max_fpr) continue;
      if (!s.best_found || p.detection > s.best_detection ||
          (p.detection == s.best_detection && p.fpr < s.best_fpr)) {
        s.best_found = true;
        s.best_threshold = p.threshold;
        s.best_detection = p.detection;
        s.best_fpr = p.fpr;
      }
    }
  }

  const double cap = modality == "image" ? 1.0 : 2.0;
  s.hist_max = cap;
  constexpr int kBins = 24;
  s.hist_natural.assign(kBins, 0);
  s.hist_adversarial.assign(kBins, 0);
  auto bin_of = [&](double v) {
    if (!std::isfinite(v)) return kBins - 1;
    int b = (int)(v / cap * kBins);
    return std::clamp(b, 0, kBins - 1);
  };
  for (double v : nat_scores) ++s.hist_natural[(size_t)bin_of(v)];
  for (double v : adv_scores) ++s.hist_adversarial[(size_t)bin_of(v)];
  return s;
}

std::string summary_json(const EvaluationSummary& s) {
  ordered_json j;
  j["modality"] = s.modality;
  j["naturals"] = s.naturals;
  j["adversarials"] = s.adversarials;
  j["detection_rate"] = s.detection_rate;
  j["fpr"] = s.fpr;
  j["auc"] = s.auc;
  j["median_natural"] = s.median_natural;
  j["median_adversarial"] = s.median_adversarial;
  ordered_json per = ordered_json::object();
  for (const auto& [kind, ks] : s.per_attack) {
    per[kind] = ordered_json{{"count", ks.count},
                             {"detection_rate", ks.detection_rate},
                             {"auc", ks.auc},
                             {"median_score", ks.median_score}};
  }
  j["per_attack"] = per;
  if (s.best_found) {
    j["best_threshold"] = s.best_threshold;
    j["best_detection"] = s.best_detection;
    j["best_fpr"] = s.best_fpr;
  }
  ordered_json grid = ordered_json::array();
  for (const RatePoint& p : s.grid)
    grid.push_back(ordered_json{
        {"threshold", p.threshold}, {"detection", p.detection}, {"fpr", p.fpr}});
  j["grid"] = grid;
  j["hist_max"] = s.hist_max;
  j["hist_natural"] = s.hist_natural;
  j["hist_adversarial"] = s.hist_adversarial;
  return j.dump(2);
}

std::string summary_table(const EvaluationSummary& s) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-18s %8s %8s %8s %8s\n", "set", "count",
                "det.rate", "auc", "median");
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %8d %8s %8s %8.4f\n", "naturals",
                s.naturals, "-", "-", s.median_natural);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %8d %8.3f %8.3f %8.4f\n", "adversarial",
                s.adversarials, s.detection_rate, s.auc, s.median_adversarial);
  os << buf;
  for (const auto& [kind, ks] : s.per_attack) {
    std::snprintf(buf, sizeof(buf), "%-18s %8d %8.3f %8.3f %8.4f\n",
                  ("  " + kind).c_str(), ks.count, ks.detection_rate, ks.auc,
                  ks.median_score);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "false positive rate %.3f\n", s.fpr);
  os << buf;
  if (s.best_found) {
    std::snprintf(buf, sizeof(buf),
                  "best threshold %.4f: detection %.3f at fpr %.3f (max fpr wanted)\n",
                  s.best_threshold, s.best_detection, s.best_fpr);
    os << buf;
  }
  return os.str();
}

}  // namespace advguard
