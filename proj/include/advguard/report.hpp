#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "advguard/metric.hpp"

namespace advguard {

struct DetectionReport {
  std::string input_id;
  std::string predicted;
  std::optional<double> d_semantic;
  std::optional<double> d_activation;
  double threshold_semantic = 0;
  double threshold_activation = 0;
  std::string verdict;  // natural | adversarial | suspicious
  std::string reason;   // reason code for suspicious verdicts, else empty
  // set by evaluation runs so summaries are recomputable from reports alone
  std::optional<bool> marked_adversarial;
  std::string attack;  // attack tag, empty for naturals
};

// One JSON object per line, fixed field order, empty optionals omitted.
std::string report_line(const DetectionReport& r);
DetectionReport parse_report_line(const std::string& line);

// Returns bytes written.
size_t save_reports(std::ostream& out, const std::vector<DetectionReport>& reports);
std::vector<DetectionReport> load_reports(std::istream& in);

}  // namespace advguard
