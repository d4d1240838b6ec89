// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "posmap/cli/documents.hpp"

namespace posmap::cli {

inline constexpr const char* kToolName = "posmap";
inline constexpr const char* kToolVersion = "1.0.0";
/// Defect threshold used by the identity suites.
inline constexpr double kDefectThreshold = 1e-9;
/// Relative tolerance when re-evaluating a stored witness value.
inline constexpr double kRecheckTol = 1e-10;

/// Report document. Everything except the top-level "timing" object is a pure
/// function of the input and the seed.
class Report {
 public:
  Report(std::string command, Json input, Json params);

  /// Appends a record with id "<index>-<test>" and returns it for filling in.
  Json& add_record(const std::string& test, const std::string& verdict, std::uint64_t seed);
  void set_timing(const std::string& record_id, double milliseconds);
  Json& summary() { return doc_["summary"]; }
  const Json& json() const { return doc_; }
  std::string dump() const { return doc_.dump(2) + "\n"; }

 private:
  Json doc_;
};

Json tolerances_json();
/// A copy without the "timing" object.
Json without_timing(const Json& report);
/// Replaces NaN and infinities with null so the document stays valid JSON.
Json finite_or_null(double v);

}  // namespace posmap::cli
