#include "advguard/report.hpp"

#include <json.hpp>

namespace advguard {

using ordered_json = nlohmann::ordered_json;

std::string report_line(const DetectionReport& r) {
  ordered_json j;
  j["input"] = r.input_id;
  j["predicted"] = r.predicted;
  if (r.d_semantic) j["d_semantic"] = *r.d_semantic;
  if (r.d_activation) j["d_activation"] = *r.d_activation;
  j["threshold_semantic"] = r.threshold_semantic;
  j["threshold_activation"] = r.threshold_activation;
  j["verdict"] = r.verdict;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.marked_adversarial) j["marked_adversarial"] = *r.marked_adversarial;
  if (!r.attack.empty()) j["attack"] = r.attack;
  return j.dump();
}

DetectionReport parse_report_line(const std::string& line) {
  DetectionReport r;
  try {
    ordered_json j = ordered_json::parse(line);
    r.input_id = j.at("input").get<std::string>();
    r.predicted = j.at("predicted").get<std::string>();
    if (j.contains("d_semantic")) r.d_semantic = j["d_semantic"].get<double>();
    if (j.contains("d_activation")) r.d_activation = j["d_activation"].get<double>();
    r.threshold_semantic = j.at("threshold_semantic").get<double>();
    r.threshold_activation = j.at("threshold_activation").get<double>();
    r.verdict = j.at("verdict").get<std::string>();
    r.reason = j.value("reason", "");
    if (j.contains("marked_adversarial"))
      r.marked_adversarial = j["marked_adversarial"].get<bool>();
    r.attack = j.value("attack", "");
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_format, "report line: " + std::string(e.what()));
  }
  return r;
}

size_t save_reports(std::ostream& out, const std::vector<DetectionReport>& reports) {
  size_t bytes = 0;
  for (const DetectionReport& r : reports) {
    const std::string line = report_line(r);
    out << line << "\n";
    bytes += line.size() + 1;
  }
  if (!out) fail(Errc::io_error, "failed writing reports");
  return bytes;
}

std::vector<DetectionReport> load_reports(std::istream& in) {
  std::vector<DetectionReport> reports;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    reports.push_back(parse_report_line(line));
  }
  return reports;
}

}  // namespace advguard
