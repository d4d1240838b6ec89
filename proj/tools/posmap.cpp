// SPDX-License-Identifier: Apache-2.0
//
// posmap: certification of positivity properties of linear maps between matrix
// algebras, and verification suites for the associated modular and cone structures.
#include <iostream>

#include "CLI11.hpp"
#include "posmap/cli/commands.hpp"
#include "posmap/error.hpp"

int main(int argc, char** argv) {
  using namespace posmap::cli;
  CLI::App app{"posmap: positive map certification and modular-theory checks"};
  app.require_subcommand(1);

  ClassifyOptions classify;
  auto* c = app.add_subcommand("classify", "Run the positivity hierarchy on a map document");
  c->add_option("input", classify.input, "Map document (JSON)")->required()->check(CLI::ExistingFile);
  c->add_option("--seed", classify.seed, "Seed for every randomized search")->required();
  c->add_option("--out", classify.out, "Report path (default: stdout)");
  c->add_option("--k-max", classify.k_max, "Largest k for the k-positivity tests")->check(CLI::PositiveNumber);
  c->add_option("--restarts", classify.restarts, "Restarts per see-saw search")->check(CLI::PositiveNumber);
  c->add_option("--samples", classify.samples, "Block samples for the S_k test")->check(CLI::PositiveNumber);
  c->add_option("--projections", classify.projections, "Projections for the P_k test")->check(CLI::PositiveNumber);
  c->add_flag("--serial", classify.serial, "Use the serial reference loops");

  ModularOptions modular;
  auto* mv = app.add_subcommand("modular-verify", "Check the modular identities on faithful states");
  mv->add_option("--seed", modular.seed, "Seed for states and sampled vectors")->required();
  mv->add_option("--out", modular.out, "Report path (default: stdout)");
  mv->add_option("--dim", modular.dim, "Hilbert space dimension (2..8)");
  mv->add_option("--trials", modular.trials, "Number of random states")->check(CLI::PositiveNumber);
  mv->add_option("--samples", modular.samples, "Cone samples per duality check")->check(CLI::PositiveNumber);
  mv->add_option("--rho-file", modular.rho_file, "Fixed density matrix document")->check(CLI::ExistingFile);

  ConeOptions cone;
  auto* cn = app.add_subcommand("cone", "Natural-cone checks on a bipartite vector or a map");
  cn->add_option("subcommand", cone.subcommand, "member | pq | prop64 | prop65 | polar | weakdec")
      ->required()
      ->check(CLI::IsMember({"member", "pq", "prop64", "prop65", "polar", "weakdec"}));
  cn->add_option("input", cone.input, "Cone or map document (JSON)")->required()->check(CLI::ExistingFile);
  cn->add_option("--seed", cone.seed, "Seed for sampled functionals")->required();
  cn->add_option("--out", cone.out, "Report path (default: stdout)");
  cn->add_option("--samples", cone.samples, "Sampled functionals or blocks")->check(CLI::PositiveNumber);
  cn->add_option("--k", cone.k, "Block size bound for weakdec")->check(CLI::PositiveNumber);
  cn->add_flag("--hull", cone.hull_search, "Search for a separating functional when outside both cones");

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Re-check every witness stored in a report");
  v->add_option("report", verify.report, "Report file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*c) return cmd_classify(classify, std::cout, std::cerr);
    if (*mv) return cmd_modular_verify(modular, std::cout, std::cerr);
    if (*cn) return cmd_cone(cone, std::cout, std::cerr);
    return cmd_verify(verify, std::cout, std::cerr);
  } catch (const posmap::Error& e) {
    std::cerr << "posmap: " << e.what() << "\n";
    return e.code() == posmap::ErrorCode::StaleWitness ? kExitFailure : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "posmap: " << e.what() << "\n";
    return kExitInputError;
  }
}
