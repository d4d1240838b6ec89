// SPDX-License-Identifier: Apache-2.0
#include "posmap/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include "posmap/cli/documents.hpp"
#include "posmap/cli/report.hpp"
#include "posmap/cones.hpp"
#include "posmap/kpos.hpp"
#include "posmap/modular.hpp"

namespace posmap::cli {
namespace {

// Stream indices for per-test seeds derived from the command seed.
constexpr std::uint64_t kStreamBlockPos = 1;
constexpr std::uint64_t kStreamDecomp = 2;
constexpr std::uint64_t kStreamKPos = 100;
constexpr std::uint64_t kStreamKCopos = 200;
constexpr std::uint64_t kStreamSk = 300;
constexpr std::uint64_t kStreamPk = 400;
constexpr std::uint64_t kStreamModular = 500;
constexpr std::uint64_t kStreamCone = 600;

std::uint64_t test_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r = Rng(seed).split(stream);
  return r.next_u64();
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Runs body, which fills a record, and stores its wall time under the record id.
void timed(Report& report, const std::function<Json&()>& body) {
  const auto start = Clock::now();
  Json& record = body();
  report.set_timing(record.at("id").get<std::string>(), elapsed_ms(start));
}

void write_report(const Report& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << report.dump();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::ParseError, path + ": cannot open for writing");
  file << report.dump();
}

Json stats_json(const SearchStats& s) {
  return Json{{"min_value", s.min_value},
              {"restarts", s.restarts},
              {"total_iterations", s.total_iterations},
              {"best_restart", s.best_restart},
              {"seed", s.seed}};
}

double scale_of(const ComplexMatrix& a) { return std::max(1.0, a.norm()); }

/// Choi matrix of a map document for the positivity tests. Deviations from
/// Hermiticity up to 1e-8 relative are treated as rounding and removed.
ComplexMatrix hermitian_choi(const LinearMapRep& phi, LinearMapRep* cleaned) {
  const ComplexMatrix h = choi_of_map(phi);
  const double defect = hermiticity_defect(h);
  if (defect > kHermitianRelTol * scale_of(h))
    throw Error(ErrorCode::NotHermitian,
                "Choi matrix is not Hermitian (defect " + std::to_string(defect) + "); positivity tests need it");
  const ComplexMatrix sym = hermitian_part(h);
  if (cleaned) *cleaned = map_of_choi(sym, phi.m(), phi.n());
  return sym;
}

bool is_ppt_psd(const ComplexMatrix& a, int k, int m) {
  const double tol = kPsdRelTol * scale_of(a);
  if (hermiticity_defect(a) > kHermitianRelTol * scale_of(a)) return false;
  return psd_min_eig(a) >= -tol &&
         psd_min_eig(hermitian_part(partial_transpose(a, k, m, TransposeSide::first))) >= -tol;
}

double quadratic(const ComplexMatrix& a, const ComplexVector& v) { return (v.adjoint() * a * v)(0, 0).real(); }

[[noreturn]] void stale(const Json& record, const std::string& why) {
  throw Error(ErrorCode::StaleWitness, "record " + record.at("id").get<std::string>() + ": " + why);
}

void expect_close(const Json& record, const char* what, double stored, double recomputed, double scale) {
  if (!(std::abs(stored - recomputed) <= kRecheckTol * std::max(1.0, scale)))
    stale(record, std::string(what) + " stored " + std::to_string(stored) + ", recomputed " +
                      std::to_string(recomputed));
}

ExecutionPolicy policy_of(bool serial) { return serial ? ExecutionPolicy::serial : ExecutionPolicy::parallel; }

// --- classify ------------------------------------------------------------------

Json k_witness(const KVerdict& v) {
  return Json{{"isometry", matrix_to_json(v.isometry)},
              {"projection", matrix_to_json(v.projection)},
              {"z", vector_to_json(v.z)},
              {"value", v.value}};
}

KVerdict k_witness_from(const Json& w, int k) {
  KVerdict v;
  v.k = k;
  v.isometry = matrix_from_json(w.at("isometry"), "isometry");
  v.projection = matrix_from_json(w.at("projection"), "projection");
  v.z = vector_from_json(w.at("z"), "z");
  v.value = w.at("value").get<double>();
  return v;
}

Json decomp_witness(const DecompVerdict& v) {
  return Json{{"state", matrix_to_json(v.state)},
              {"value", v.value},
              {"decomposable_by_inspection", v.decomposable_by_inspection}};
}

}  // namespace

int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream&) {
  const Json input = read_document(opts.input);
  const MapDocument doc = map_from_document(input);
  LinearMapRep phi = doc.map;
  const ComplexMatrix h = hermitian_choi(doc.map, &phi);
  const int m = phi.m();
  const int n = phi.n();
  if (opts.k_max < 1) throw Error(ErrorCode::KOutOfRange, "--k-max must be at least 1");
  const ExecutionPolicy policy = policy_of(opts.serial);

  SearchParams search;
  search.restarts = opts.restarts;
  search.policy = policy;
  SampleParams sample;
  sample.samples = opts.samples;
  sample.policy = policy;
  PkParams pk;
  pk.projections = opts.projections;
  pk.policy = policy;
  DecompParams decomp;
  decomp.policy = policy;

  const Json params{{"seed", opts.seed},
                    {"k_max", opts.k_max},
                    {"search", {{"restarts", search.restarts},
                                {"max_iterations", search.max_iterations},
                                {"improvement_tol", search.improvement_tol}}},
                    {"sk_samples", sample.samples},
                    {"pk", {{"projections", pk.projections},
                            {"witness_restarts", pk.witness.restarts},
                            {"witness_max_iterations", pk.witness.max_iterations}}},
                    {"decomposability", {{"restarts", decomp.restarts},
                                         {"max_iterations", decomp.max_iterations},
                                         {"step", decomp.step},
                                         {"min_step", decomp.min_step}}}};
  Report report("classify", input, params);
  Json& summary = report.summary();

  CpVerdict cp;
  timed(report, [&]() -> Json& {
    cp = is_cp(phi);
    Json& r = report.add_record("is_cp", cp.completely_positive ? "evidence" : "violation", opts.seed);
    r["exact"] = true;
    r["witness"] = Json{{"z", vector_to_json(cp.witness)}, {"value", cp.min_eigenvalue}};
    return r;
  });
  const double copos_min = psd_min_eig(hermitian_part(partial_transpose(h, m, n, TransposeSide::first)));

  timed(report, [&]() -> Json& {
    const std::uint64_t seed = test_seed(opts.seed, kStreamBlockPos);
    const BlockPosVerdict v = block_positivity(h, m, n, search, seed);
    Json& r = report.add_record("block_positivity", to_string(v.kind), seed);
    r["witness"] = Json{{"x", vector_to_json(v.x)}, {"y", vector_to_json(v.y)}, {"value", v.value}};
    r["stats"] = stats_json(v.stats);
    summary["positive"] = to_string(v.kind);
    return r;
  });

  const int k_top = std::min(opts.k_max, n);
  Json kpos = Json::object();
  Json kcopos = Json::object();
  int highest_pos = 0;
  int highest_copos = 0;
  bool pos_chain = true;
  bool copos_chain = true;
  for (int k = 1; k <= k_top; ++k) {
    timed(report, [&]() -> Json& {
      const std::uint64_t seed = test_seed(opts.seed, kStreamKPos + static_cast<std::uint64_t>(k));
      const KVerdict v = is_k_positive(phi, k, search, seed);
      Json& r = report.add_record("k_positive", to_string(v.kind), seed);
      r["k"] = k;
      r["exact"] = k >= std::min(m, n);
      r["witness"] = k_witness(v);
      r["stats"] = stats_json(v.stats);
      kpos[std::to_string(k)] = to_string(v.kind);
      pos_chain = pos_chain && v.kind == VerdictKind::evidence;
      if (pos_chain) highest_pos = k;
      return r;
    });
    timed(report, [&]() -> Json& {
      const std::uint64_t seed = test_seed(opts.seed, kStreamKCopos + static_cast<std::uint64_t>(k));
      const KVerdict v = is_k_copositive(phi, k, search, seed);
      Json& r = report.add_record("k_copositive", to_string(v.kind), seed);
      r["k"] = k;
      r["exact"] = k >= std::min(m, n);
      r["witness"] = k_witness(v);
      r["stats"] = stats_json(v.stats);
      kcopos[std::to_string(k)] = to_string(v.kind);
      copos_chain = copos_chain && v.kind == VerdictKind::evidence;
      if (copos_chain) highest_copos = k;
      return r;
    });
  }

  Json sk = Json::object();
  Json pkj = Json::object();
  for (int k = 1; k <= opts.k_max; ++k) {
    timed(report, [&]() -> Json& {
      const std::uint64_t seed = test_seed(opts.seed, kStreamSk + static_cast<std::uint64_t>(k));
      const SkVerdict v = sk_check(phi, k, sample, seed);
      Json& r = report.add_record("sk", to_string(v.kind), seed);
      r["k"] = k;
      r["samples"] = v.samples;
      r["min_value"] = v.min_value;
      r["witness"] = Json{{"block", matrix_to_json(v.block)}, {"vector", vector_to_json(v.vector)}, {"value", v.value}};
      sk[std::to_string(k)] = to_string(v.kind);
      return r;
    });
    timed(report, [&]() -> Json& {
      const std::uint64_t seed = test_seed(opts.seed, kStreamPk + static_cast<std::uint64_t>(k));
      const PkVerdict v = pk_check(phi, k, pk, seed);
      Json& r = report.add_record("pk", to_string(v.kind), seed);
      r["k"] = k;
      r["samples"] = v.samples;
      r["min_value"] = v.min_value;
      Json w = decomp_witness(v.corner);
      w["isometry"] = matrix_to_json(v.isometry);
      r["witness"] = std::move(w);
      pkj[std::to_string(k)] = to_string(v.kind);
      return r;
    });
  }

  timed(report, [&]() -> Json& {
    const std::uint64_t seed = test_seed(opts.seed, kStreamDecomp);
    const DecompVerdict v = decomposability_witness(h, m, n, decomp, seed);
    Json& r = report.add_record("decomposability", to_string(v.kind), seed);
    r["witness"] = decomp_witness(v);
    r["stats"] = stats_json(v.stats);
    summary["decomposable"] = v.decomposable_by_inspection ? "evidence_by_inspection" : to_string(v.kind);
    return r;
  });

  summary["completely_positive"] = cp.completely_positive;
  summary["completely_copositive"] = copos_min >= -psd_tolerance(h);
  summary["k_positive"] = kpos;
  summary["k_copositive"] = kcopos;
  summary["highest_k_positive_evidence"] = highest_pos;
  summary["highest_k_copositive_evidence"] = highest_copos;
  summary["S_k"] = sk;
  summary["P_k"] = pkj;
  summary["D_k"] = "not inferred";
  write_report(report, opts.out, out);
  return kExitOk;
}

// --- modular-verify --------------------------------------------------------------

namespace {

Json defects_json(const DefectReport& d) {
  Json j = Json::object();
  for (const auto& [name, value] : d) j[name] = finite_or_null(value);
  return j;
}

}  // namespace

int cmd_modular_verify(const ModularOptions& opts, std::ostream& out, std::ostream&) {
  if (opts.dim < 2 || opts.dim > 8)
    throw Error(ErrorCode::DimensionMismatch, "--dim must lie in [2, 8]");
  if (opts.trials < 1) throw Error(ErrorCode::DimensionMismatch, "--trials must be positive");
  Json input{{"dim", opts.dim}, {"trials", opts.trials}};
  std::optional<ComplexMatrix> fixed;
  if (!opts.rho_file.empty()) {
    const Json doc = read_document(opts.rho_file);
    fixed = state_from_document(doc);
    input = Json{{"rho_document", doc}, {"trials", opts.trials}};
  }
  const ModularSuiteParams suite{opts.samples, 0.1};
  Report report("modular-verify", input,
                Json{{"seed", opts.seed}, {"samples", suite.samples}, {"flip_beta", suite.flip_beta}});

  Json worst = Json::object();
  bool ok = true;
  for (int t = 0; t < opts.trials; ++t) {
    timed(report, [&]() -> Json& {
      const std::uint64_t seed = test_seed(opts.seed, kStreamModular + static_cast<std::uint64_t>(t));
      ComplexMatrix rho;
      if (fixed) {
        rho = *fixed;
      } else {
        Rng rng(seed);
        rho = random_faithful_state(opts.dim, rng);
      }
      const GnsContext ctx = gns_context(rho);
      const DefectReport d = modular_suite(ctx, suite, seed);
      const double mx = max_defect(d);
      const bool pass = mx <= kDefectThreshold;
      ok = ok && pass;
      Json& r = report.add_record("modular_suite", pass ? "pass" : "fail", seed);
      r["rho"] = matrix_to_json(rho);
      r["defects"] = defects_json(d);
      r["max_defect"] = finite_or_null(mx);
      for (const auto& [name, value] : d)
        if (!worst.contains(name) || worst[name].is_null() || !(value <= worst[name].get<double>()))
          worst[name] = finite_or_null(value);
      return r;
    });
  }
  report.summary()["max_defect_per_identity"] = worst;
  report.summary()["all_within_threshold"] = ok;
  write_report(report, opts.out, out);
  return ok ? kExitOk : kExitFailure;
}

// --- cone ------------------------------------------------------------------------

namespace {

ComplexMatrix tracial(int d) { return ComplexMatrix::Identity(d, d) / static_cast<double>(d); }

int int_field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer() || doc.at(key).get<long long>() < 1)
    throw Error(ErrorCode::ParseError, std::string("/") + key + ": expected a positive integer");
  return static_cast<int>(doc.at(key).get<long long>());
}

struct ConeInput {
  BipartiteConeContext ctx;
  ComplexMatrix xi;
};

/// {"dim_a", "dim_b", optional "rho_a"/"rho_b", and "vector" or "blocks"}; matrices in the
/// product frame of the two states.
ConeInput cone_input(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "/: expected a cone document object");
  const int da = int_field(doc, "dim_a");
  const int db = int_field(doc, "dim_b");
  const auto state = [&](const char* key, int d) {
    if (!doc.contains(key)) return tracial(d);
    const ComplexMatrix rho = matrix_from_json(doc.at(key), std::string("/") + key);
    if (rho.rows() != d || rho.cols() != d)
      throw Error(ErrorCode::DimensionMismatch, std::string("/") + key + ": expected " + std::to_string(d) + "x" +
                                                    std::to_string(d));
    return rho;
  };
  BipartiteConeContext ctx = bipartite_context(state("rho_a", da), state("rho_b", db));
  const int d = da * db;
  ComplexMatrix xi;
  if (doc.contains("vector")) {
    xi = matrix_from_json(doc.at("vector"), "/vector");
  } else if (doc.contains("blocks")) {
    const ComplexMatrix blocks = matrix_from_json(doc.at("blocks"), "/blocks");
    if (blocks.rows() != d || blocks.cols() != d)
      throw Error(ErrorCode::DimensionMismatch, "/blocks: expected " + std::to_string(d) + "x" + std::to_string(d));
    xi = ctx.vector_of_blocks(blocks);
  } else {
    throw Error(ErrorCode::ParseError, "/: missing \"vector\" or \"blocks\"");
  }
  if (xi.rows() != d || xi.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "/vector: expected " + std::to_string(d) + "x" + std::to_string(d));
  return {std::move(ctx), std::move(xi)};
}

Json membership_json(const ConeMembership& c) {
  Json j{{"blocks", matrix_to_json(c.blocks)},
         {"blocks_hermiticity_defect", c.blocks_hermiticity_defect},
         {"min_eig_p", c.min_eig_p},
         {"min_eig_ptau", c.min_eig_ptau},
         {"min_eig_ptau_via_u", c.min_eig_ptau_via_u},
         {"route_defect", c.route_defect},
         {"in_p", c.in_p},
         {"in_ptau", c.in_ptau},
         {"in_intersection", c.in_intersection},
         {"in_hull_evidence", c.in_hull_evidence}};
  if (c.hull_search) j["hull_search"] = decomp_witness(*c.hull_search);
  return j;
}

Json pq_json(const PqSplit& s) {
  return Json{{"p", matrix_to_json(s.p)},
              {"q", matrix_to_json(s.q)},
              {"orthogonality_defect", s.orthogonality_defect},
              {"norm_defect", s.norm_defect},
              {"closed_form_defect", s.closed_form_defect}};
}

double pq_max_defect(const PqSplit& s) {
  return std::max({s.orthogonality_defect, s.norm_defect, s.closed_form_defect});
}

Json inequalities_json(const ConeInequalities& c) {
  return Json{{"abs_q_by_p", c.abs_q_by_p},
              {"pairing_nonnegative", c.pairing_nonnegative},
              {"twice_q_by_xi", c.twice_q_by_xi},
              {"pb_over_qb", c.pb_over_qb},
              {"ua_pairing", c.ua_pairing},
              {"norm_q_by_p", c.norm_q_by_p},
              {"total_bound", c.total_bound},
              {"violations", c.violations},
              {"samples", c.samples},
              {"worst_eta", matrix_to_json(c.worst_eta)}};
}

/// (eta, P xi) - |(eta, Q xi)| for one eta.
double abs_q_by_p_slack(const BipartiteConeContext& ctx, const ComplexMatrix& xi, const ComplexMatrix& eta) {
  const PqSplit s = pq_split(ctx, xi);
  return hs_inner(eta, s.p).real() - std::abs(hs_inner(eta, s.q));
}

Json flags_json(const FixedPointFlags& f) {
  return Json{{"q_in_p", f.q_in_p}, {"q_zero", f.q_zero}, {"fixed", f.fixed}, {"agree", f.agree()}};
}

Json polar_json(const QPolar& p) {
  return Json{{"vtilde", matrix_to_json(p.vtilde.matrix)},
              {"xi_b", matrix_to_json(p.xi_b)},
              {"h", matrix_to_json(p.h)},
              {"degenerate", p.degenerate},
              {"reconstruction_defect", p.reconstruction_defect},
              {"xi_b_in_p", p.xi_b_in_p}};
}

WeakDecParams weakdec_params(const Json& doc, int samples, ExecutionPolicy policy) {
  WeakDecParams p;
  p.samples = samples;
  p.policy = policy;
  if (doc.contains("rho_a")) p.rho_a = matrix_from_json(doc.at("rho_a"), "/rho_a");
  return p;
}

Json weakdec_witness(const WeakDecVerdict& v) {
  return Json{{"block_size", v.block_size},
              {"blocks", matrix_to_json(v.blocks)},
              {"eta", matrix_to_json(v.eta)},
              {"xi", matrix_to_json(v.xi)},
              {"value", v.value}};
}

WeakDecVerdict weakdec_from(const Json& w, int k) {
  WeakDecVerdict v;
  v.kind = VerdictKind::violation;
  v.k = k;
  v.block_size = w.at("block_size").get<int>();
  v.blocks = matrix_from_json(w.at("blocks"), "blocks");
  v.eta = matrix_from_json(w.at("eta"), "eta");
  v.xi = matrix_from_json(w.at("xi"), "xi");
  v.value = w.at("value").get<double>();
  return v;
}

}  // namespace

int cmd_cone(const ConeOptions& opts, std::ostream& out, std::ostream&) {
  const Json input = read_document(opts.input);
  const std::string& sub = opts.subcommand;
  const std::uint64_t seed = test_seed(opts.seed, kStreamCone);
  Json params{{"seed", opts.seed}, {"samples", opts.samples}};
  if (sub == "weakdec") params["k"] = opts.k;
  if (sub == "member") params["hull_search"] = opts.hull_search;
  Report report("cone " + sub, input, params);
  bool ok = true;

  if (sub == "weakdec") {
    const MapDocument doc = map_from_document(input);
    LinearMapRep phi = doc.map;
    hermitian_choi(doc.map, &phi);
    const WeakDecParams wp = weakdec_params(input, opts.samples, ExecutionPolicy::parallel);
    timed(report, [&]() -> Json& {
      const WeakDecVerdict v = weak_kdec_cone_check(phi, opts.k, wp, seed);
      Json& r = report.add_record("weak_kdec", to_string(v.kind), seed);
      r["k"] = opts.k;
      r["samples_per_size"] = v.samples_per_size;
      r["min_value"] = v.min_value;
      r["witness"] = weakdec_witness(v);
      report.summary()["weakly_k_decomposable"] = to_string(v.kind);
      return r;
    });
    write_report(report, opts.out, out);
    return kExitOk;
  }

  const ConeInput ci = cone_input(input);
  if (sub == "member") {
    DecompParams hull;
    timed(report, [&]() -> Json& {
      const ConeMembership c = cone_member(ci.ctx, ci.xi, opts.hull_search ? &hull : nullptr, seed);
      ok = c.route_defect <= kDefectThreshold * scale_of(ci.xi);
      Json& r = report.add_record("cone_member", ok ? "pass" : "fail", seed);
      r["result"] = membership_json(c);
      report.summary() = Json{{"in_p", c.in_p}, {"in_ptau", c.in_ptau}, {"in_intersection", c.in_intersection},
                              {"in_hull_evidence", c.in_hull_evidence}};
      return r;
    });
  } else if (sub == "pq") {
    timed(report, [&]() -> Json& {
      const PqSplit s = pq_split(ci.ctx, ci.xi);
      ok = pq_max_defect(s) <= kDefectThreshold * scale_of(ci.xi);
      Json& r = report.add_record("pq_split", ok ? "pass" : "fail", seed);
      r["result"] = pq_json(s);
      report.summary()["max_defect"] = pq_max_defect(s);
      return r;
    });
  } else if (sub == "prop64") {
    timed(report, [&]() -> Json& {
      const ConeInequalities c = prop64_check(ci.ctx, ci.xi, opts.samples, seed, ExecutionPolicy::parallel);
      ok = c.violations == 0;
      Json& r = report.add_record("intersection_inequalities", ok ? "evidence" : "violation", seed);
      r["result"] = inequalities_json(c);
      report.summary() = Json{{"violations", c.violations}, {"min_slack", c.min_slack()}};
      return r;
    });
  } else if (sub == "prop65") {
    timed(report, [&]() -> Json& {
      const FixedPointFlags f = prop65_check(ci.ctx, ci.xi);
      ok = f.agree();
      Json& r = report.add_record("fixed_point_flags", ok ? "pass" : "fail", seed);
      r["result"] = flags_json(f);
      report.summary() = flags_json(f);
      return r;
    });
  } else if (sub == "polar") {
    timed(report, [&]() -> Json& {
      const QPolar p = q_polar(ci.ctx, ci.xi);
      ok = p.reconstruction_defect <= kDefectThreshold * scale_of(ci.xi) && p.xi_b_in_p;
      Json& r = report.add_record("q_polar", ok ? "pass" : "fail", seed);
      r["result"] = polar_json(p);
      report.summary() = Json{{"reconstruction_defect", p.reconstruction_defect}, {"xi_b_in_p", p.xi_b_in_p}};
      return r;
    });
  } else {
    throw Error(ErrorCode::ParseError, "unknown cone subcommand \"" + sub + "\"");
  }
  write_report(report, opts.out, out);
  return ok ? kExitOk : kExitFailure;
}

// --- verify ----------------------------------------------------------------------

namespace {

void verify_classify(const Json& report) {
  const Json& input = report.at("input").at("document");
  const MapDocument doc = map_from_document(input);
  LinearMapRep phi = doc.map;
  const ComplexMatrix h = hermitian_choi(doc.map, &phi);
  const int m = phi.m();
  const int n = phi.n();
  const ComplexMatrix h_copos = hermitian_part(partial_transpose(h, m, n, TransposeSide::first));
  const double hs = scale_of(h);

  for (const Json& r : report.at("records")) {
    const std::string test = r.at("test").get<std::string>();
    const bool violation = r.at("verdict").get<std::string>() == "violation";
    const Json& w = r.at("witness");
    const double stored = w.at("value").get<double>();
    if (test == "is_cp") {
      const ComplexVector z = vector_from_json(w.at("z"), "z");
      expect_close(r, "value", stored, quadratic(h, z), hs);
      expect_close(r, "min eigenvalue", stored, psd_min_eig(h), hs);
      if (violation != (stored < -psd_tolerance(h))) stale(r, "verdict does not match the eigenvalue");
    } else if (test == "block_positivity") {
      const ComplexVector x = vector_from_json(w.at("x"), "x");
      const ComplexVector y = vector_from_json(w.at("y"), "y");
      if (std::abs(x.norm() - 1.0) > 1e-10 || std::abs(y.norm() - 1.0) > 1e-10) stale(r, "factors not unit");
      expect_close(r, "value", stored, product_form(h, x, y), hs);
      if (violation && !(stored < -psd_tolerance(h))) stale(r, "value is not negative");
    } else if (test == "k_positive" || test == "k_copositive") {
      const int k = r.at("k").get<int>();
      const ComplexMatrix& target = test == "k_positive" ? h : h_copos;
      const KVerdict v = k_witness_from(w, k);
      if (violation) {
        double recomputed = 0.0;
        if (!recheck_k_violation(target, m, n, k, v, &recomputed))
          stale(r, "witness does not re-check (recomputed " + std::to_string(recomputed) + ")");
      } else {
        expect_close(r, "value", stored, quadratic(target, v.z), hs);
      }
    } else if (test == "sk") {
      const int k = r.at("k").get<int>();
      const ComplexMatrix block = matrix_from_json(w.at("block"), "block");
      const ComplexVector v = vector_from_json(w.at("vector"), "vector");
      const ComplexMatrix image = apply_blockwise(phi, block, k);
      expect_close(r, "value", stored, quadratic(image, v), scale_of(image));
      if (!is_ppt_psd(block, k, m)) stale(r, "block matrix is not PSD in both orderings");
      if (violation && !(stored < -psd_tolerance(hermitian_part(image)))) stale(r, "value is not negative");
    } else if (test == "pk" || test == "decomposability") {
      ComplexMatrix target = h;
      int nn = n;
      if (test == "pk") {
        const ComplexMatrix iso = matrix_from_json(w.at("isometry"), "isometry");
        if (iso.rows() != n) stale(r, "isometry has the wrong size");
        if ((iso.adjoint() * iso - ComplexMatrix::Identity(iso.cols(), iso.cols())).norm() > 1e-10)
          stale(r, "isometry is not an isometry");
        target = hermitian_part(choi_of_map(phi.compressed(iso)));
        nn = static_cast<int>(iso.cols());
      }
      const ComplexMatrix state = matrix_from_json(w.at("state"), "state");
      if (violation) {
        if (!recheck_decomp_violation(target, m, nn, state, stored)) stale(r, "witness does not re-check");
      } else {
        if (state.rows() != target.rows()) stale(r, "state has the wrong size");
        expect_close(r, "value", stored, hs_inner(state, target).real(), scale_of(target));
      }
    } else {
      stale(r, "unknown test \"" + test + "\"");
    }
  }
}

void verify_modular(const Json& report) {
  const Json& params = report.at("params");
  const ModularSuiteParams suite{params.at("samples").get<int>(), params.at("flip_beta").get<double>()};
  for (const Json& r : report.at("records")) {
    const ComplexMatrix rho = matrix_from_json(r.at("rho"), "rho");
    const std::uint64_t seed = r.at("seed").get<std::uint64_t>();
    const DefectReport d = modular_suite(gns_context(rho), suite, seed);
    const Json& stored = r.at("defects");
    for (const auto& [name, value] : d) {
      if (!stored.contains(name)) stale(r, "missing defect " + name);
      const Json& s = stored.at(name);
      if (s.is_null() ? std::isfinite(value) : !(std::abs(s.get<double>() - value) <= kRecheckTol))
        stale(r, "defect " + name + " does not reproduce");
    }
    const bool pass = max_defect(d) <= kDefectThreshold;
    if (pass != (r.at("verdict").get<std::string>() == "pass")) stale(r, "verdict does not match the defects");
  }
}

void verify_cone(const Json& report, const std::string& sub) {
  const Json& input = report.at("input").at("document");
  const Json& params = report.at("params");
  for (const Json& r : report.at("records")) {
    const std::uint64_t seed = r.at("seed").get<std::uint64_t>();
    const std::string verdict = r.at("verdict").get<std::string>();
    if (sub == "weakdec") {
      const MapDocument doc = map_from_document(input);
      LinearMapRep phi = doc.map;
      hermitian_choi(doc.map, &phi);
      const WeakDecParams wp = weakdec_params(input, params.at("samples").get<int>(), ExecutionPolicy::serial);
      const Json& w = r.at("witness");
      const int k = r.at("k").get<int>();
      if (verdict == "violation") {
        double recomputed = 0.0;
        if (!recheck_weak_kdec_violation(phi, wp, weakdec_from(w, k), &recomputed))
          stale(r, "witness does not re-check (recomputed " + std::to_string(recomputed) + ")");
      } else if (w.at("block_size").get<int>() > 0) {
        WeakDecVerdict v = weakdec_from(w, k);
        double recomputed = 0.0;
        recheck_weak_kdec_violation(phi, wp, v, &recomputed);
        expect_close(r, "value", v.value, recomputed, scale_of(v.eta));
      }
      continue;
    }
    const ConeInput ci = cone_input(input);
    const Json& res = r.at("result");
    const double xs = scale_of(ci.xi);
    if (sub == "member") {
      const ConeMembership c = cone_member(ci.ctx, ci.xi);
      expect_close(r, "min_eig_p", res.at("min_eig_p").get<double>(), c.min_eig_p, xs);
      expect_close(r, "min_eig_ptau", res.at("min_eig_ptau").get<double>(), c.min_eig_ptau, xs);
      if (res.at("in_p").get<bool>() != c.in_p || res.at("in_ptau").get<bool>() != c.in_ptau)
        stale(r, "membership flags do not reproduce");
    } else if (sub == "pq") {
      const PqSplit s = pq_split(ci.ctx, ci.xi);
      if ((matrix_from_json(res.at("p"), "p") - s.p).norm() > kRecheckTol * xs ||
          (matrix_from_json(res.at("q"), "q") - s.q).norm() > kRecheckTol * xs)
        stale(r, "P/Q components do not reproduce");
      if ((verdict == "pass") != (pq_max_defect(s) <= kDefectThreshold * xs)) stale(r, "verdict mismatch");
    } else if (sub == "prop64") {
      const ComplexMatrix eta = matrix_from_json(res.at("worst_eta"), "worst_eta");
      if (!cone_member(ci.ctx, eta).in_p) stale(r, "worst eta is not in the natural cone");
      expect_close(r, "abs_q_by_p", res.at("abs_q_by_p").get<double>(), abs_q_by_p_slack(ci.ctx, ci.xi, eta), xs);
    } else if (sub == "prop65") {
      const FixedPointFlags f = prop65_check(ci.ctx, ci.xi);
      if (res.at("q_in_p").get<bool>() != f.q_in_p || res.at("q_zero").get<bool>() != f.q_zero ||
          res.at("fixed").get<bool>() != f.fixed)
        stale(r, "flags do not reproduce");
    } else if (sub == "polar") {
      const QPolar p = q_polar(ci.ctx, ci.xi);
      expect_close(r, "reconstruction_defect", res.at("reconstruction_defect").get<double>(),
                   p.reconstruction_defect, xs);
      if (res.at("xi_b_in_p").get<bool>() != p.xi_b_in_p) stale(r, "xi_b membership does not reproduce");
    }
    (void)seed;
  }
}

}  // namespace

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream&) {
  const Json report = read_document(opts.report);
  try {
    if (!report.is_object() || report.value("tool", "") != kToolName)
      throw Error(ErrorCode::ParseError, opts.report + ": not a posmap report");
    const Json& input = report.at("input");
    if (digest(input.at("document")) != input.at("digest").get<std::string>())
      throw Error(ErrorCode::StaleWitness, "record input: digest does not match the embedded document");
    const std::string command = report.at("command").get<std::string>();
    if (command == "classify") {
      verify_classify(report);
    } else if (command == "modular-verify") {
      verify_modular(report);
    } else if (command.rfind("cone ", 0) == 0) {
      verify_cone(report, command.substr(5));
    } else {
      throw Error(ErrorCode::ParseError, "unknown command \"" + command + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, opts.report + ": malformed report: " + e.what());
  }
  out << "verified " << report.at("records").size() << " records\n";
  return kExitOk;
}

}  // namespace posmap::cli
