#pragma once

#include <map>
#include <string>
#include <vector>

#include "advguard/report.hpp"

namespace advguard {

struct RatePoint {
  double threshold = 0;
  double detection = 0;  // fraction of adversarial items scoring above
  double fpr = 0;        // fraction of naturals scoring above
};

struct KindStats {
  int count = 0;
  double detection_rate = 0;  // verdict-based at the configured thresholds
  double auc = 0;             // primary-score AUC vs all naturals
  double median_score = 0;
};

struct EvaluationSummary {
  std::string modality;
  int naturals = 0;
  int adversarials = 0;
  double detection_rate = 0;  // verdict != natural over adversarial items
  double fpr = 0;             // verdict != natural over natural items
  double auc = 0;
  double median_natural = 0;
  double median_adversarial = 0;
  std::map<std::string, KindStats> per_attack;
  std::vector<RatePoint> grid;
  double best_threshold = 0;
  double best_detection = 0;
  double best_fpr = 0;
  bool best_found = false;
  std::vector<int> hist_natural;      // primary-score histograms
  std::vector<int> hist_adversarial;
  double hist_max = 0;
};

struct EvalConfig {
  double grid_lo = 0.0;
  double grid_hi = 1.0;
  double grid_step = 0.01;
  double max_fpr = 0.10;
};

// The primary detection score of a report: d_semantic for images,
// d_activation otherwise; suspicious verdicts score +infinity.
double primary_score(const DetectionReport& r, const std::string& modality);

// Mann-Whitney AUC with midrank tie handling.
double auc_score(const std::vector<double>& natural_scores,
                 const std::vector<double>& adversarial_scores);

// Everything here is recomputed from the report lines alone.
EvaluationSummary summarize(const std::vector<DetectionReport>& reports,
                            const std::string& modality, const EvalConfig& cfg);

std::string summary_json(const EvaluationSummary& s);
std::string summary_table(const EvaluationSummary& s);

}  // namespace advguard
