// SPDX-License-Identifier: Apache-2.0
#include "posmap/cli/report.hpp"

#include <cmath>
#include <cstdio>

#include "posmap/modular.hpp"

namespace posmap::cli {

Report::Report(std::string command, Json input, Json params) {
  doc_["tool"] = kToolName;
  doc_["version"] = kToolVersion;
  doc_["command"] = std::move(command);
  const std::string hash = digest(input);
  doc_["input"] = Json{{"digest", hash}, {"document", std::move(input)}};
  doc_["tolerances"] = tolerances_json();
  doc_["params"] = std::move(params);
  doc_["records"] = Json::array();
  doc_["summary"] = Json::object();
  doc_["timing"] = Json{{"records_ms", Json::object()}};
}

Json& Report::add_record(const std::string& test, const std::string& verdict, std::uint64_t seed) {
  Json& records = doc_["records"];
  char id[16];
  std::snprintf(id, sizeof id, "%03zu", records.size());
  records.push_back(Json{{"id", std::string(id) + "-" + test}, {"test", test}, {"verdict", verdict}, {"seed", seed}});
  return records.back();
}

void Report::set_timing(const std::string& record_id, double milliseconds) {
  doc_["timing"]["records_ms"][record_id] = milliseconds;
}

Json tolerances_json() {
  return Json{{"psd_relative", kPsdRelTol},
              {"hermitian_relative", kHermitianRelTol},
              {"witness_recheck_relative", kRecheckTol},
              {"defect_threshold", kDefectThreshold},
              {"faithful_min_eigenvalue", kFaithfulMinEig},
              {"max_condition_number", kMaxConditionNumber},
              {"state_trace", kStateTraceTol}};
}

Json without_timing(const Json& report) {
  Json copy = report;
  if (copy.is_object()) copy.erase("timing");
  return copy;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace posmap::cli
