// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "posmap/cli/commands.hpp"
#include "posmap/cli/documents.hpp"
#include "posmap/cli/report.hpp"
#include "support.hpp"

using namespace posmap;
using namespace posmap::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "posmap_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_json(const std::string& name, const Json& doc) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << doc.dump(1);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json load(const std::string& path) { return parse_document(slurp(path), path); }

ClassifyOptions classify_opts(const std::string& input, const std::string& out) {
  ClassifyOptions o;
  o.input = input;
  o.out = out;
  o.seed = 42;
  o.restarts = 16;
  o.samples = 100;
  o.projections = 20;
  return o;
}

int verify(const std::string& path) {
  std::ostringstream out;
  std::ostringstream err;
  return cmd_verify({path}, out, err);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("matrix documents round-trip and report bad shapes") {
  Rng rng(1);
  const ComplexMatrix a = random_complex_matrix(2, 3, rng);
  CHECK(matrix_from_json(matrix_to_json(a), "/") == a);
  Json bad = matrix_to_json(a);
  bad["data"].erase(bad["data"].size() - 1);
  CHECK(code_of([&] { matrix_from_json(bad, "/m"); }) == ErrorCode::DimensionMismatch);
  Json pair = matrix_to_json(a);
  pair["data"][2] = Json::array({1.0});
  CHECK(code_of([&] { matrix_from_json(pair, "/m"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { parse_document("{\"m\": 2,", "x"); }) == ErrorCode::ParseError);
}

TEST_CASE("map documents in all three encodings agree") {
  const LinearMapRep t = LinearMapRep::transposition(2);
  const MapDocument choi = map_from_document(map_document(t, "t"));
  CHECK(choi.map.distance(t) < 1e-15);

  Json units{{"m", 2}, {"n", 2}, {"encoding", "unit-action"}, {"units", Json::array()}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) units["units"].push_back(matrix_to_json(matrix_unit(2, j, i)));
  CHECK(map_from_document(units).map.distance(t) < 1e-15);

  Json kraus{{"m", 2}, {"n", 2}, {"encoding", "kraus"}, {"kraus", Json::array({matrix_to_json(testing::pauli_x())})},
             {"weights", Json::array({2.0})}};
  const LinearMapRep k = map_from_document(kraus).map;
  CHECK((k.apply(matrix_unit(2, 0, 0)) - 2.0 * matrix_unit(2, 1, 1)).norm() < 1e-15);

  Json wrong = units;
  wrong["n"] = 3;
  CHECK(code_of([&] { map_from_document(wrong); }) == ErrorCode::DimensionMismatch);
  Json unknown = units;
  unknown["encoding"] = "pauli";
  CHECK(code_of([&] { map_from_document(unknown); }) == ErrorCode::ParseError);
}

TEST_CASE("classify the transposition map") {
  const std::string in = write_json("t.json", map_document(LinearMapRep::transposition(2), "transposition"));
  const std::string out = (scratch() / "t_report.json").string();
  std::ostringstream o, e;
  REQUIRE(cmd_classify(classify_opts(in, out), o, e) == kExitOk);
  const Json r = load(out);
  const Json& s = r.at("summary");
  CHECK(s.at("positive") == "evidence");
  CHECK(s.at("k_positive").at("2") == "violation");
  CHECK(s.at("completely_copositive") == true);
  CHECK(s.at("decomposable") != "violation");
  for (const Json& rec : r.at("records"))
    if (rec.at("test") == "k_positive" && rec.at("k") == 2)
      CHECK(rec.at("witness").at("value").get<double>() == doctest::Approx(-1.0));
  CHECK(r.at("tolerances").at("psd_relative").get<double>() == kPsdRelTol);
  CHECK(r.at("params").at("search").at("restarts") == 16);
  CHECK(r.at("input").at("digest") == digest(r.at("input").at("document")));
  CHECK(verify(out) == kExitOk);
}

TEST_CASE("classify identity and minus identity") {
  const std::string id = write_json("id.json", map_document(LinearMapRep::identity(2), "id"));
  const std::string id_out = (scratch() / "id_report.json").string();
  std::ostringstream o, e;
  REQUIRE(cmd_classify(classify_opts(id, id_out), o, e) == kExitOk);
  const Json r = load(id_out);
  CHECK(r.at("summary").at("completely_positive") == true);
  CHECK(r.at("summary").at("highest_k_positive_evidence") == 2);
  CHECK(verify(id_out) == kExitOk);

  const std::string neg = write_json("neg.json", map_document(LinearMapRep::identity(2) * -1.0, "-id"));
  const std::string neg_out = (scratch() / "neg_report.json").string();
  REQUIRE(cmd_classify(classify_opts(neg, neg_out), o, e) == kExitOk);
  for (const Json& rec : load(neg_out).at("records")) CHECK(rec.at("verdict") == "violation");
  CHECK(verify(neg_out) == kExitOk);
}

TEST_CASE("reports are byte-identical apart from timing, for both execution policies") {
  const std::string in = write_json("choi.json", map_document(testing::choi_map(), "choi"));
  const std::string a = (scratch() / "a.json").string();
  const std::string b = (scratch() / "b.json").string();
  std::ostringstream o, e;
  ClassifyOptions oa = classify_opts(in, a);
  ClassifyOptions ob = classify_opts(in, b);
  ob.serial = true;
  REQUIRE(cmd_classify(oa, o, e) == kExitOk);
  REQUIRE(cmd_classify(ob, o, e) == kExitOk);
  CHECK(without_timing(load(a)).dump() == without_timing(load(b)).dump());
  CHECK(load(a).at("summary").at("decomposable") == "violation");
  CHECK(verify(a) == kExitOk);
}

TEST_CASE("a corrupted witness is reported as stale with its record id") {
  const std::string in = write_json("t2.json", map_document(LinearMapRep::transposition(2), "t"));
  const std::string out = (scratch() / "t2_report.json").string();
  std::ostringstream o, e;
  REQUIRE(cmd_classify(classify_opts(in, out), o, e) == kExitOk);
  Json r = load(out);
  std::string id;
  for (Json& rec : r["records"])
    if (rec["test"] == "k_positive" && rec["k"] == 2) {
      rec["witness"]["value"] = -1.25;
      id = rec["id"].get<std::string>();
    }
  const std::string bad = write_json("t2_bad.json", r);
  try {
    verify(bad);
    FAIL("expected StaleWitness");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::StaleWitness);
    CHECK(std::string(err.what()).find(id) != std::string::npos);
  }

  Json evidence = load(out);
  for (Json& rec : evidence["records"])
    if (rec["test"] == "sk") rec["witness"]["value"] = rec["witness"]["value"].get<double>() + 0.1;
  CHECK(code_of([&] { verify(write_json("t2_bad_ev.json", evidence)); }) == ErrorCode::StaleWitness);

  Json doc = load(out);
  doc["input"]["document"]["name"] = "edited";
  CHECK(code_of([&] { verify(write_json("t2_bad_digest.json", doc)); }) == ErrorCode::StaleWitness);
}

TEST_CASE("modular-verify") {
  ModularOptions m;
  m.dim = 3;
  m.trials = 2;
  m.samples = 30;
  m.seed = 9;
  m.out = (scratch() / "mod_a.json").string();
  std::ostringstream o, e;
  CHECK(cmd_modular_verify(m, o, e) == kExitOk);
  const std::string first = slurp(m.out);
  m.out = (scratch() / "mod_b.json").string();
  CHECK(cmd_modular_verify(m, o, e) == kExitOk);
  CHECK(without_timing(parse_document(first, "a")).dump() == without_timing(load(m.out)).dump());
  CHECK(load(m.out).at("summary").at("all_within_threshold") == true);
  CHECK(verify(m.out) == kExitOk);

  m.rho_file = write_json("singular.json", Json{{"rho", matrix_to_json(testing::diag({1.0, 0.0}))}});
  m.dim = 2;
  CHECK(code_of([&] { cmd_modular_verify(m, o, e); }) == ErrorCode::NotFaithful);
  m.rho_file.clear();
  m.dim = 9;
  CHECK(code_of([&] { cmd_modular_verify(m, o, e); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("cone subcommands") {
  std::ostringstream o, e;
  const Json omega{{"dim_a", 2}, {"dim_b", 2}, {"blocks", matrix_to_json(ComplexMatrix::Identity(4, 4))}};
  const std::string in = write_json("omega.json", omega);
  ComplexMatrix sym = ComplexMatrix::Identity(4, 4) * 0.5;
  sym(0, 3) = sym(3, 0) = 0.2;
  sym(1, 2) = sym(2, 1) = 0.2;
  const std::string sym_in = write_json(
      "sym.json", Json{{"dim_a", 2}, {"dim_b", 2}, {"rho_a", matrix_to_json(testing::diag({0.6, 0.4}))},
                       {"blocks", matrix_to_json(sym)}});

  ConeOptions c;
  c.seed = 3;
  c.samples = 50;
  for (const char* sub : {"member", "pq", "prop64", "prop65", "polar"}) {
    for (const std::string& input : {in, sym_in}) {
      c.subcommand = sub;
      c.input = input;
      c.out = (scratch() / (std::string("cone_") + sub + ".json")).string();
      CHECK(cmd_cone(c, o, e) == kExitOk);
      CHECK(verify(c.out) == kExitOk);
    }
  }
  c.subcommand = "member";
  c.input = in;
  c.out = (scratch() / "member.json").string();
  REQUIRE(cmd_cone(c, o, e) == kExitOk);
  CHECK(load(c.out).at("summary").at("in_p") == true);
  CHECK(load(c.out).at("summary").at("in_ptau") == true);

  c.subcommand = "prop65";
  c.input = sym_in;
  c.out = (scratch() / "fixed.json").string();
  REQUIRE(cmd_cone(c, o, e) == kExitOk);
  const Json f = load(c.out).at("summary");
  CHECK(f.at("q_in_p") == true);
  CHECK(f.at("q_zero") == true);
  CHECK(f.at("fixed") == true);

  c.subcommand = "weakdec";
  c.input = write_json("t3.json", map_document(LinearMapRep::transposition(2), "t"));
  c.k = 2;
  c.out = (scratch() / "weakdec.json").string();
  REQUIRE(cmd_cone(c, o, e) == kExitOk);
  CHECK(load(c.out).at("summary").at("weakly_k_decomposable") == "evidence");
  CHECK(verify(c.out) == kExitOk);

  c.input = write_json("negid.json", map_document(LinearMapRep::identity(2) * -1.0, "-id"));
  c.out = (scratch() / "weakdec_neg.json").string();
  REQUIRE(cmd_cone(c, o, e) == kExitOk);
  CHECK(load(c.out).at("summary").at("weakly_k_decomposable") == "violation");
  CHECK(verify(c.out) == kExitOk);

  const ComplexVector psi = testing::max_entangled(2);
  c.subcommand = "prop64";
  c.input = write_json("ent.json", Json{{"dim_a", 2}, {"dim_b", 2}, {"blocks", matrix_to_json(psi * psi.adjoint())}});
  CHECK(code_of([&] { cmd_cone(c, o, e); }) == ErrorCode::NotInIntersection);
}
