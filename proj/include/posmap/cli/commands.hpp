// SPDX-License-Identifier: Apache-2.0
//
// Subcommand implementations behind the posmap executable. Each returns the
// process exit code: 0 success, 1 verification or defect failure, 2 input error.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace posmap::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInputError = 2 };

struct ClassifyOptions {
  std::string input;
  std::string out;  ///< empty: write the report to stdout
  std::uint64_t seed = 0;
  int k_max = 2;
  int restarts = 32;
  int samples = 500;
  int projections = 100;
  bool serial = false;
};

struct ModularOptions {
  std::string out;
  std::uint64_t seed = 0;
  int dim = 2;
  int trials = 1;
  int samples = 100;
  std::string rho_file;  ///< optional fixed state; otherwise random faithful states
};

struct ConeOptions {
  std::string subcommand;  ///< member | pq | prop64 | prop65 | polar | weakdec
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  int samples = 500;
  int k = 2;
  bool hull_search = false;
};

struct VerifyOptions {
  std::string report;
};

int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_modular_verify(const ModularOptions& opts, std::ostream& out, std::ostream& err);
int cmd_cone(const ConeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace posmap::cli
